#include "pforest/degseq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pforest/error.hpp"

namespace pforest {

DegreeSequence DegreeSequence::validate(const std::map<Degree, Count>& counts) {
  DegreeSequence s;
  for (const auto& [degree, count] : counts) {
    if (degree < 0) throw Error(Errc::InvalidArgument, "negative degree " + std::to_string(degree));
    if (count < 0) throw Error(Errc::InvalidArgument, "negative count for degree " + std::to_string(degree));
    if (count == 0) continue;
    s.counts_[degree] = count;
    s.n_ += count;
    s.c_ += (1 - degree) * count;
  }
  if (s.n_ == 0) throw Error(Errc::EmptySequence, "degree sequence has no nodes");
  if (s.c_ <= 0) {
    throw Error(Errc::NotAForest, "c(s) = " + std::to_string(s.c_) + " is not positive");
  }
  return s;
}

Count DegreeSequence::count(Degree i) const {
  auto it = counts_.find(i);
  return it == counts_.end() ? 0 : it->second;
}

DegreeVector degree_vector(const DegreeSequence& s) {
  DegreeVector d;
  d.reserve(static_cast<std::size_t>(s.n()));
  for (const auto& [degree, count] : s.counts()) d.insert(d.end(), static_cast<std::size_t>(count), degree);
  return d;
}

DegreeSequence histogram(std::span<const Degree> degrees) {
  std::map<Degree, Count> counts;
  for (Degree d : degrees) ++counts[d];
  return DegreeSequence::validate(counts);
}

namespace {

EmpiricalDist empirical_from_counts(const std::map<Degree, Count>& counts, Count n) {
  EmpiricalDist e;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& [degree, count] : counts) {
    const double p = static_cast<double>(count) * inv_n;
    const auto i = static_cast<double>(degree);
    e.probs[degree] = p;
    e.mean += i * p;
    e.second_moment += i * i * p;
    e.factorial_moment += i * (i - 1.0) * p;
  }
  return e;
}

}  // namespace

EmpiricalDist empirical(const DegreeSequence& s) { return empirical_from_counts(s.counts(), s.n()); }

EmpiricalDist empirical(std::span<const Degree> degrees) {
  if (degrees.empty()) throw Error(Errc::EmptySequence, "empty degree list");
  // Dense tally first; degree supports are small.
  std::vector<Count> dense;
  for (Degree d : degrees) {
    if (d < 0) throw Error(Errc::InvalidArgument, "negative degree");
    const auto i = static_cast<std::size_t>(d);
    if (i >= dense.size()) dense.resize(i + 1, 0);
    ++dense[i];
  }
  std::map<Degree, Count> counts;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] > 0) counts[static_cast<Degree>(i)] = dense[i];
  }
  return empirical_from_counts(counts, static_cast<Count>(degrees.size()));
}

TruncatedMoments truncated_moments(const DegreeSequence& s, Degree t) {
  if (t < 1) throw Error(Errc::InvalidArgument, "truncation level must be >= 1");
  const double n = static_cast<double>(s.n());
  TruncatedMoments m;
  double small_sq = 0.0;
  for (const auto& [degree, count] : s.counts()) {
    const double j = static_cast<double>(degree);
    const double w = static_cast<double>(count) / n;
    if (degree >= t + 1) {
      m.mu_plus += (j - 1.0) * w;
      m.sigma_plus_sq += j * (j - 1.0) * w;
    } else {
      small_sq += (j - 1.0) * (j - 1.0) * w;
    }
  }
  const double mean_small = -m.mu_plus - static_cast<double>(s.c()) / n;
  m.sigma_minus_sq = small_sq - mean_small * mean_small;
  return m;
}

double limit_sigma(const DegreeSequence& s) {
  return std::sqrt(std::max(0.0, empirical(s).factorial_moment));
}

OffspringLaw OffspringLaw::geometric(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw Error(Errc::InvalidArgument, "geometric parameter must lie in (0,1]");
  OffspringLaw law;
  law.kind_ = Kind::Geometric;
  law.param_ = q;
  std::ostringstream os;
  os << "geometric:" << q;
  law.label_ = os.str();
  return law;
}

OffspringLaw OffspringLaw::poisson(double lambda) {
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "poisson mean must be nonnegative");
  OffspringLaw law;
  law.kind_ = Kind::Poisson;
  law.param_ = lambda;
  std::ostringstream os;
  os << "poisson:" << lambda;
  law.label_ = os.str();
  return law;
}

OffspringLaw OffspringLaw::weights(std::vector<double> p) {
  if (p.empty()) throw Error(Errc::InvalidArgument, "empty weight list");
  double total = 0.0;
  for (double w : p) {
    if (!(w >= 0.0)) throw Error(Errc::InvalidArgument, "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "weights must sum to 1");
  OffspringLaw law;
  law.kind_ = Kind::Weights;
  std::ostringstream os;
  os << "weights:";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  law.label_ = os.str();
  law.weights_ = std::move(p);
  return law;
}

OffspringLaw OffspringLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::InvalidArgument, "offspring law must look like name:params, got '" + std::string(text) + "'");
  }
  const std::string name(text.substr(0, colon));
  const std::string rest(text.substr(colon + 1));
  auto parse_double = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "bad number '" + text + "' in offspring law");
    }
  };
  if (name == "geometric") return geometric(parse_double(rest));
  if (name == "poisson") return poisson(parse_double(rest));
  if (name == "weights") {
    std::vector<double> p;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) p.push_back(parse_double(item));
    return weights(std::move(p));
  }
  throw Error(Errc::InvalidArgument, "unknown offspring law '" + name + "'");
}

double OffspringLaw::prob(Degree i) const {
  if (i < 0) return 0.0;
  switch (kind_) {
    case Kind::Geometric:
      return param_ * std::pow(1.0 - param_, static_cast<double>(i));
    case Kind::Poisson:
      if (param_ == 0.0) return i == 0 ? 1.0 : 0.0;
      return std::exp(-param_ + static_cast<double>(i) * std::log(param_) -
                      std::lgamma(static_cast<double>(i) + 1.0));
    case Kind::Weights:
      return static_cast<std::size_t>(i) < weights_.size() ? weights_[static_cast<std::size_t>(i)] : 0.0;
  }
  return 0.0;
}

double OffspringLaw::tail(Degree i) const {
  if (i <= 0) return 1.0;
  switch (kind_) {
    case Kind::Geometric:
      return std::pow(1.0 - param_, static_cast<double>(i));
    case Kind::Poisson: {
      double head = 0.0;
      for (Degree k = 0; k < i; ++k) head += prob(k);
      return std::max(0.0, 1.0 - head);
    }
    case Kind::Weights: {
      double t = 0.0;
      for (std::size_t k = static_cast<std::size_t>(i); k < weights_.size(); ++k) t += weights_[k];
      return t;
    }
  }
  return 0.0;
}

double OffspringLaw::mean() const {
  switch (kind_) {
    case Kind::Geometric:
      return (1.0 - param_) / param_;
    case Kind::Poisson:
      return param_;
    case Kind::Weights: {
      double m = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k) m += static_cast<double>(k) * weights_[k];
      return m;
    }
  }
  return 0.0;
}

DegreeSequence make_degree_sequence(const OffspringLaw& p, Count n, Count c_target,
                                    std::uint64_t /*seed*/) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  if (c_target < 1) throw Error(Errc::InvalidArgument, "c_target must be positive");
  if (std::abs(p.mean() - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "offspring law must have mean 1");
  if (c_target >= n && p.prob(0) < 1.0) {
    throw Error(Errc::Infeasible, "c(s) = n forces every degree to be 0");
  }

  const double dn = static_cast<double>(n);
  std::map<Degree, Count> counts;
  for (Degree i = 0; p.tail(i) * dn >= 0.5; ++i) {
    const auto rounded = static_cast<Count>(std::llround(dn * p.prob(i)));
    if (rounded > 0) counts[i] = rounded;
  }

  Count total = 0;
  Count c = 0;
  for (const auto& [degree, count] : counts) {
    total += count;
    c += (1 - degree) * count;
  }
  // Restore the node total; degree-1 nodes do not affect c.
  if (total < n) {
    counts[1] += n - total;
  } else if (total > n) {
    Count excess = total - n;
    for (Degree i : {Degree{1}, Degree{0}}) {
      const Count take = std::min(excess, counts[i]);
      counts[i] -= take;
      c -= (1 - i) * take;
      excess -= take;
    }
    for (auto it = counts.rbegin(); excess > 0 && it != counts.rend(); ++it) {
      const Count take = std::min(excess, it->second);
      it->second -= take;
      c -= (1 - it->first) * take;
      excess -= take;
    }
  }

  Count swaps = 0;
  while (c != c_target) {
    if (++swaps > n) throw Error(Errc::Infeasible, "fix-up needs more than n conversions");
    if (c < c_target) {
      Degree from = -1;
      if (counts[1] > 0) {
        from = 1;
      } else {
        for (const auto& [degree, count] : counts) {
          if (degree >= 2 && count > 0) {
            from = degree;
            break;
          }
        }
      }
      if (from < 0) throw Error(Errc::Infeasible, "no node left whose degree can be lowered");
      --counts[from];
      ++counts[from - 1];
      ++c;
    } else {
      if (counts[0] == 0) throw Error(Errc::Infeasible, "no leaf left to convert");
      --counts[0];
      ++counts[1];
      --c;
    }
  }
  return DegreeSequence::validate(counts);
}

void to_json(nlohmann::json& j, const DegreeSequence& s) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [degree, count] : s.counts()) counts[std::to_string(degree)] = count;
  j = nlohmann::json{{"counts", counts}};
}

DegreeSequence degree_sequence_from_json(const nlohmann::json& j) {
  const nlohmann::json& counts = j.contains("counts") ? j.at("counts") : j;
  if (!counts.is_object()) throw Error(Errc::InvalidArgument, "degree sequence must be a JSON object");
  std::map<Degree, Count> parsed;
  for (const auto& [key, value] : counts.items()) {
    Degree degree = 0;
    const auto* first = key.data();
    const auto* last = key.data() + key.size();
    auto [ptr, ec] = std::from_chars(first, last, degree);
    if (ec != std::errc{} || ptr != last) throw Error(Errc::InvalidArgument, "bad degree key '" + key + "'");
    if (!value.is_number_integer()) throw Error(Errc::InvalidArgument, "count for degree " + key + " is not an integer");
    parsed[degree] = value.get<Count>();
  }
  return DegreeSequence::validate(parsed);
}

}  // namespace pforest
