#include "hop/weights.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hop/errors.hpp"
#include "hop/groups.hpp"

namespace hop {

namespace {

double parse_double(std::string_view s, std::string_view what) {
  std::string str(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + str + "'");
  }
  if (used != str.size())
    throw ConfigError("trailing characters in " + std::string(what) + ": '" + str + "'");
  return v;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  double v = parse_double(s, what);
  if (v != std::floor(v) || std::abs(v) > 1e15)
    throw ConfigError(std::string(what) + " must be an integer, got '" + std::string(s) + "'");
  return static_cast<std::int64_t>(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string_view kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::TwoPoint: return "two-point";
    case WeightKind::DysonGamma: return "dyson-gamma";
    case WeightKind::LogNormal: return "lognormal";
    case WeightKind::EmpiricalFile: return "empirical-file";
    case WeightKind::Toral: return "toral";
    case WeightKind::Constant: return "constant";
    case WeightKind::Sampler: return "sampler";
  }
  return "?";
}

void WeightProcessSpec::validate() const {
  switch (kind) {
    case WeightKind::TwoPoint:
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("two-point: p must lie in [0,1]");
      if (p == 0.5)
        throw ConfigError("two-point: p = 1/2 gives weight 2p-1 = 0 (edge percolation)");
      break;
    case WeightKind::DysonGamma:
      if (order < 1) throw ConfigError("dyson-gamma: order m must be >= 1");
      break;
    case WeightKind::LogNormal:
      if (!(sigma_logw > 0) || !std::isfinite(sigma_logw))
        throw ConfigError("lognormal: sigma must be positive and finite");
      break;
    case WeightKind::Constant:
      if (value == 0 || !std::isfinite(value))
        throw ConfigError("constant: value must be nonzero and finite");
      break;
    case WeightKind::EmpiricalFile:
      if (empirical.empty()) throw ConfigError("empirical-file: no values loaded");
      for (double v : empirical)
        if (v == 0 || !std::isfinite(v))
          throw ConfigError("empirical-file: zero or non-finite entry");
      break;
    case WeightKind::Toral:
      ToralSystem::from_spec(*this).validate();
      if (!(shift > 4.0))
        throw ConfigError("toral: shift must exceed 4 so that f never vanishes");
      break;
    case WeightKind::Sampler:
      if (!sampler) throw ConfigError("sampler: no callback supplied");
      break;
  }
}

std::string WeightProcessSpec::label() const {
  std::string k(kind_name(kind));
  switch (kind) {
    case WeightKind::TwoPoint: return k + ":" + fmt(p);
    case WeightKind::DysonGamma: return k + ":" + std::to_string(order);
    case WeightKind::LogNormal: return k + ":" + fmt(sigma_logw);
    case WeightKind::Constant: return k + ":" + fmt(value);
    case WeightKind::EmpiricalFile: return k + ":" + path;
    case WeightKind::Toral:
      return k + ":" + std::to_string(matrix[0]) + "," + std::to_string(matrix[1]) + "," +
             std::to_string(matrix[2]) + "," + std::to_string(matrix[3]) + ":" + fmt(shift);
    case WeightKind::Sampler: return k + ":" + sampler_name;
  }
  return k;
}

WeightProcessSpec WeightProcessSpec::two_point(double p, std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::TwoPoint;
  s.p = p;
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::dyson_gamma(int m, std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::DysonGamma;
  s.order = m;
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::lognormal(double sd, std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::LogNormal;
  s.sigma_logw = sd;
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::constant(double c, std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::Constant;
  s.value = c;
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::toral(std::array<std::int64_t, 4> b, double shift,
                                           std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::Toral;
  s.matrix = b;
  s.shift = shift;
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::from_sampler(WeightSampler f, std::string name,
                                                  std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::Sampler;
  s.sampler = std::move(f);
  s.sampler_name = std::move(name);
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec WeightProcessSpec::empirical_file(const std::string& path,
                                                    std::uint64_t seed) {
  WeightProcessSpec s;
  s.kind = WeightKind::EmpiricalFile;
  s.path = path;
  s.empirical = load_empirical_weights(path);
  s.seed = seed;
  s.validate();
  return s;
}

WeightProcessSpec parse_spec(std::string_view text, std::uint64_t seed) {
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&](std::string_view what) {
    if (rest.empty())
      throw ConfigError("spec '" + std::string(text) + "' is missing its " +
                        std::string(what));
  };
  if (head == "two-point") {
    need_arg("p parameter");
    return WeightProcessSpec::two_point(parse_double(rest, "p"), seed);
  }
  if (head == "lamplighter") {
    need_arg("p parameter");
    LamplighterSpec l;
    l.p = parse_double(rest, "p");
    return lamplighter_process(l, seed);
  }
  if (head == "dyson-gamma") {
    need_arg("order");
    std::int64_t m = parse_int(rest, "order");
    if (m < 1 || m > 1000000) throw ConfigError("dyson-gamma: order m must be >= 1");
    return WeightProcessSpec::dyson_gamma(static_cast<int>(m), seed);
  }
  if (head == "lognormal") {
    need_arg("sigma");
    return WeightProcessSpec::lognormal(parse_double(rest, "sigma"), seed);
  }
  if (head == "constant") {
    need_arg("value");
    return WeightProcessSpec::constant(parse_double(rest, "value"), seed);
  }
  if (head == "empirical-file") {
    need_arg("path");
    return WeightProcessSpec::empirical_file(std::string(rest), seed);
  }
  if (head == "sol") {
    if (!rest.empty()) throw ConfigError("sol takes no parameters; use toral:a,b,c,d:shift");
    return WeightProcessSpec::toral({2, 1, 1, 1}, 5.0, seed);
  }
  if (head == "toral") {
    std::array<std::int64_t, 4> b{2, 1, 1, 1};
    double shift = 5.0;
    if (!rest.empty()) {
      auto parts = split(rest, ':');
      if (parts.size() > 2) throw ConfigError("toral: expected toral:a,b,c,d[:shift]");
      auto entries = split(parts[0], ',');
      if (entries.size() != 4) throw ConfigError("toral: matrix needs 4 entries");
      for (int i = 0; i < 4; ++i) b[i] = parse_int(entries[i], "matrix entry");
      if (parts.size() == 2) shift = parse_double(parts[1], "shift");
    }
    return WeightProcessSpec::toral(b, shift, seed);
  }
  throw ConfigError("unknown weight process '" + std::string(head) +
                    "' (expected two-point, dyson-gamma, lognormal, constant, "
                    "empirical-file, toral, sol or lamplighter)");
}

std::vector<double> load_empirical_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weight file '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    double v = parse_double(std::string_view(line).substr(b, e - b + 1),
                            "weight on line " + std::to_string(lineno));
    if (v == 0 || !std::isfinite(v))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": zero or non-finite weight");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("weight file '" + path + "' has no values");
  return out;
}

WeightSequence WeightSequence::from_values(const Eigen::ArrayXd& v, Provenance prov) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] == 0 || !std::isfinite(v[i]))
      throw ConfigError("weight a_" + std::to_string(i + 1) + " is zero or non-finite");
  WeightSequence w;
  w.values = v;
  w.logs = v.abs().log();
  w.provenance = std::move(prov);
  return w;
}

WeightSequence WeightSequence::from_values(std::initializer_list<double> v) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) a[i++] = x;
  return from_values(a, {"explicit", 0, 0});
}

WeightSequence sample(const WeightProcessSpec& spec, Eigen::Index n, std::uint64_t trial) {
  if (n < 1) throw ConfigError("sample: n must be >= 1");
  spec.validate();
  Provenance prov{spec.label(), spec.seed, trial};
  if (spec.kind == WeightKind::Toral) {
    WeightSequence w =
        toral_orbit_weights(ToralSystem::from_spec(spec), haar_point(spec.seed, trial), n);
    w.provenance = prov;
    return w;
  }

  Rng rng = trial_rng(spec.seed, trial);
  Eigen::ArrayXd v(n);
  switch (spec.kind) {
    case WeightKind::TwoPoint: {
      const double low = 2 * spec.p - 1;
      for (Eigen::Index i = 0; i < n; ++i) v[i] = (rng() >> 63) ? low : 1.0;
      break;
    }
    case WeightKind::DysonGamma: {
      std::exponential_distribution<double> ex(static_cast<double>(spec.order));
      for (Eigen::Index i = 0; i < n; ++i) {
        double lam = 0;
        for (int j = 0; j < spec.order; ++j) lam += ex(rng);
        v[i] = std::sqrt(lam);
      }
      break;
    }
    case WeightKind::LogNormal: {
      std::normal_distribution<double> nd(0.0, spec.sigma_logw);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = std::exp(nd(rng));
      break;
    }
    case WeightKind::Constant: v.setConstant(spec.value); break;
    case WeightKind::EmpiricalFile: {
      std::uniform_int_distribution<std::size_t> pick(0, spec.empirical.size() - 1);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = spec.empirical[pick(rng)];
      break;
    }
    case WeightKind::Sampler:
      for (Eigen::Index i = 0; i < n; ++i) v[i] = spec.sampler(rng);
      break;
    case WeightKind::Toral: break;
  }
  return WeightSequence::from_values(v, prov);
}

Walk log_ratio_walk(const WeightSequence& w) {
  const Eigen::Index k = w.size() / 2;
  Walk out;
  out.n = w.size();
  out.U.resize(k);
  out.S.resize(k + 1);
  out.S[0] = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    out.U[i] = 2 * w.logs[2 * i] - 2 * w.logs[2 * i + 1];
    out.S[i + 1] = out.S[i] + out.U[i];
  }
  return out;
}

namespace {

struct Moments {
  double mean = 0, var = 0, stderr_var = 0;
};

Moments sample_moments(const Eigen::ArrayXd& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  m.mean = x.mean();
  Eigen::ArrayXd c = x - m.mean;
  m.var = c.square().sum() / (n - 1);
  const double m4 = c.square().square().mean();
  m.stderr_var = std::sqrt(std::max(0.0, (m4 - m.var * m.var) / n));
  return m;
}

VarianceSummary monte_carlo_iid(const WeightProcessSpec& spec) {
  const Eigen::Index n = 200000;
  WeightSequence w = sample(spec, n, 0x7661726961ULL);
  Moments m = sample_moments(w.logs);
  VarianceSummary v;
  v.sigma2 = m.var;
  v.stderr_sigma2 = m.stderr_var;
  v.varU = 8 * m.var;
  v.sigma2_eff = m.var;
  v.stderr_sigma2_eff = m.stderr_var;
  v.exact = false;
  return v;
}

VarianceSummary monte_carlo_toral(const WeightProcessSpec& spec) {
  const int orbits = 2000;
  const Eigen::Index pairs = 500;
  Eigen::ArrayXd logs(orbits * 2 * pairs), u1(orbits), send(orbits);
  for (int t = 0; t < orbits; ++t) {
    WeightSequence w = sample(spec, 2 * pairs, 0x746f72616cULL + t);
    logs.segment(t * 2 * pairs, 2 * pairs) = w.logs;
    Walk walk = log_ratio_walk(w);
    u1[t] = walk.U[0];
    send[t] = walk.S[pairs];
  }
  VarianceSummary v;
  Moments ml = sample_moments(logs);
  v.sigma2 = ml.var;
  v.stderr_sigma2 = ml.stderr_var;  // ignores serial correlation
  v.varU = sample_moments(u1).var;
  Moments ms = sample_moments(send);
  v.sigma2_eff = ms.var / (8.0 * pairs);
  v.stderr_sigma2_eff = ms.stderr_var / (8.0 * pairs);
  v.exact = false;
  return v;
}

}  // namespace

VarianceSummary variance_summary(const WeightProcessSpec& spec) {
  spec.validate();
  VarianceSummary v;
  switch (spec.kind) {
    case WeightKind::TwoPoint: {
      const double l = std::log(std::abs(2 * spec.p - 1));
      v.sigma2 = 0.25 * l * l;
      break;
    }
    case WeightKind::DysonGamma: {
      // Var log a = Var(log lambda)/4 = trigamma(m)/4
      double trigamma = std::numbers::pi * std::numbers::pi / 6;
      for (int k = 1; k < spec.order; ++k) trigamma -= 1.0 / (double(k) * k);
      v.sigma2 = 0.25 * trigamma;
      break;
    }
    case WeightKind::LogNormal: v.sigma2 = spec.sigma_logw * spec.sigma_logw; break;
    case WeightKind::Constant: v.sigma2 = 0; break;
    case WeightKind::EmpiricalFile: {
      Eigen::Map<const Eigen::ArrayXd> x(spec.empirical.data(),
                                         static_cast<Eigen::Index>(spec.empirical.size()));
      Eigen::ArrayXd l = x.abs().log();
      v.sigma2 = (l - l.mean()).square().mean();
      break;
    }
    case WeightKind::Sampler: v = monte_carlo_iid(spec); break;
    case WeightKind::Toral: v = monte_carlo_toral(spec); break;
  }
  if (v.exact) {
    v.varU = 8 * v.sigma2;
    v.sigma2_eff = v.sigma2;
  }
  v.degenerate = v.sigma2 <= 0;
  return v;
}

}  // namespace hop
