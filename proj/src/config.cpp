#include "qsync/config.hpp"

#include <cstdio>
#include <stdexcept>

#include "qsync/defaults_json.hpp"
#include "qsync/textio.hpp"

namespace qsync::config {

namespace {

collision::CollisionConfig collision_from(const nlohmann::json& j) {
  collision::CollisionConfig c;
  c.omega2 = j.at("omega2").get<double>();
  c.omega1 = c.omega2;
  c.j = j.at("j").get<double>();
  c.lam = j.at("lam").get<double>();
  c.dt_s = j.at("dt_s").get<double>();
  c.dt_ss = j.at("dt_ss").get<double>();
  c.dt_se = j.at("dt_se").get<double>();
  c.n_collisions = j.at("n_collisions").get<int>();
  c.env_p = j.at("env_p").get<double>();
  if (!(c.omega2 > 0.0)) throw std::invalid_argument("omega2 must be positive");
  c.validate();
  return c;
}

lindblad::MeConfig me_from(const nlohmann::json& j) {
  lindblad::MeConfig c;
  c.omega2 = j.at("omega2").get<double>();
  c.omega1 = c.omega2;
  c.f12 = j.at("f12").get<double>();
  c.g = j.at("g").get<double>();
  c.a12 = j.at("a12").get<double>();
  c.n_bar = j.at("n_bar").get<double>();
  c.t_max = j.at("t_max").get<double>();
  c.sample_dt = j.at("sample_dt").get<double>();
  if (!(c.omega2 > 0.0)) throw std::invalid_argument("omega2 must be positive");
  c.validate();
  return c;
}

sweep::GridPoint point_from(const nlohmann::json& j) {
  sweep::GridPoint p;
  p.omega_ratio = j.at("omega_ratio").get<double>();
  p.lam = j.value("lam", 0.0);
  p.j = j.value("j", 0.0);
  p.f12 = j.value("f12", 0.0);
  return p;
}

}  // namespace

const sweep::GridPoint& Defaults::export_point(Model model) const {
  switch (model) {
    case Model::Lcm:
      return export_lcm;
    case Model::Gcm:
      return export_gcm;
    case Model::Me:
      return export_me;
  }
  throw std::invalid_argument("export_point: unknown model");
}

const char* embedded_defaults_text() { return kEmbeddedDefaultsJson; }

Defaults from_json(const nlohmann::json& tree) {
  Defaults d;
  try {
    d.version = tree.at("version").get<int>();
    if (d.version != kConfigVersion) {
      throw FormatError("config version " + std::to_string(d.version) + " (expected " +
                        std::to_string(kConfigVersion) + ")");
    }
    d.base.lcm = collision_from(tree.at("lcm"));
    d.base.gcm = collision_from(tree.at("gcm"));
    d.base.me = me_from(tree.at("me"));
    d.base.init.p = tree.at("initial_state").at("p").get<double>();
    d.base.init.branch_split = tree.at("initial_state").at("branch_split").get<double>();
    d.base.window = tree.at("dataset").at("window").get<int>();
    d.eps_max = tree.at("dataset").at("eps_max").get<double>();
    d.export_lcm = point_from(tree.at("export").at("lcm"));
    d.export_gcm = point_from(tree.at("export").at("gcm"));
    d.export_me = point_from(tree.at("export").at("me"));
    const auto& s = tree.at("scans");
    d.scans.n_early = s.at("n_early").get<std::vector<int>>();
    d.scans.rates = s.at("rates").get<std::vector<double>>();
    d.scans.init_error = s.at("init_error").get<std::vector<double>>();
    d.scans.temperature = s.at("temperature").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad config: ") + e.what());
  }
  d.source = tree;
  return d;
}

Defaults embedded_defaults() { return from_json(nlohmann::json::parse(kEmbeddedDefaultsJson)); }

Defaults load_file(const std::filesystem::path& path) { return from_json(textio::read_json(path)); }

void apply_override(nlohmann::json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json::json_pointer ptr;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    ptr /= key.substr(start, dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!tree.contains(ptr)) throw std::invalid_argument("unknown config key '" + key + "'");
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  tree[ptr] = value;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const nlohmann::json& tree) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(fnv1a(tree.dump())));
  return buf;
}

}  // namespace qsync::config
