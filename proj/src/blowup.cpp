#include "virtblow/blowup.hpp"

#include <algorithm>
#include <array>
#include <regex>

#include "virtblow/transforms.hpp"
#include "virtblow/universal.hpp"

namespace vb {

namespace {

struct KindName {
  RelationKind kind;
  const char* name;
};

constexpr std::array<KindName, 7> kKindNames{{
    {RelationKind::verlinde_plain, "verlinde_plain"},
    {RelationKind::verlinde_phased, "verlinde_phased"},
    {RelationKind::segre_plain, "segre_plain"},
    {RelationKind::segre_exp_lower, "segre_exp_lower"},
    {RelationKind::segre_exp_upper, "segre_exp_upper"},
    {RelationKind::segre_phased_moment, "segre_phased_moment"},
    {RelationKind::segre_phased, "segre_phased"},
}};

const char* kind_name(RelationKind k) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == k) return kn.name;
  }
  return "?";
}

bool in_range(int v, int lo, int hi) { return lo <= v && v <= hi; }

[[noreturn]] void out_of_range(const RelationId& id, const std::string& why) {
  throw DomainError("relation " + to_string(id) + " out of range: " + why);
}

Series one_plus(const CycContextPtr& ctx, const Series& f) {
  return Series::constant(CycNum(ctx, Rational(1)), f.order()) + f;
}

// x-layer n of exp(x^2 Q + x a R).
Series gaussian_layer(const Series& Q, const Series& R, const Rational& a, int n) {
  Series zero = Q * Rational(0);
  auto arg = XSeries<CycNum>::from_terms({zero, R * a, Q}, n);
  return exp(arg).layer(n);
}

struct SegreRhsParts {
  Series t2, p1, p2, L2_exponent;
};

SegreRhsParts segre_parts(int rho, const Rational& s, int order) {
  auto ctx = cyc_context(rho);
  VarChain chain = var_chain(rho, s - rho, s, order);
  SegreRhsParts parts;
  parts.t2 = chain.t_of_z * chain.t_of_z;
  parts.p1 = one_plus(ctx, parts.t2 * (1 - s / rho));
  parts.p2 = one_plus(ctx, parts.t2 * (2 - s / rho));
  parts.L2_exponent = parts.t2 * parts.p1 * ratio(1, 2);
  return parts;
}

Series segre_plain_rhs(const SegreRhsParts& p, const Rational& a, const Rational& s, int rho) {
  return pow(p.p2, a * (a + s) / 2) * pow(p.p1, -a * (a + s - rho) / 2);
}

}  // namespace

std::string to_string(const RelationId& id) {
  std::string s = kind_name(id.kind);
  auto num = [](int v) { return std::to_string(v); };
  switch (id.kind) {
    case RelationKind::verlinde_plain:
    case RelationKind::segre_plain:
      return s + "(a=" + num(id.shift) + ")";
    case RelationKind::verlinde_phased:
      return s + "(l=" + num(id.phase_power) + ",i=" + num(id.shift) + ")";
    case RelationKind::segre_exp_lower:
    case RelationKind::segre_exp_upper:
      return s + "(a=" + num(id.shift) + ",n=" + num(id.layer) + ")";
    case RelationKind::segre_phased_moment:
      return s + "(l=" + num(id.phase_power) + ",a=" + num(id.shift) + ",n=" + num(id.layer) + ")";
    case RelationKind::segre_phased:
      return s + "(l=" + num(id.phase_power) + ",a=" + num(id.shift) + ")";
  }
  return s;
}

RelationId parse_relation(const std::string& text) {
  static const std::regex re(R"(^([a-z_]+)\(([^)]*)\)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ConfigError("malformed relation '" + text + "'");
  RelationId id;
  bool found = false;
  for (const auto& kn : kKindNames) {
    if (m[1] == kn.name) {
      id.kind = kn.kind;
      found = true;
    }
  }
  if (!found) throw ConfigError("unknown relation kind in '" + text + "'");
  static const std::regex kv(R"(([a-z])=(-?[0-9]+))");
  std::string args = m[2];
  for (auto it = std::sregex_iterator(args.begin(), args.end(), kv); it != std::sregex_iterator(); ++it) {
    int v = std::stoi((*it)[2]);
    char key = (*it)[1].str()[0];
    if (key == 'l') {
      id.phase_power = v;
    } else if (key == 'a' || key == 'i') {
      id.shift = v;
    } else if (key == 'n') {
      id.layer = v;
    } else {
      throw ConfigError("unknown relation parameter in '" + text + "'");
    }
  }
  if (to_string(id) != text) throw ConfigError("malformed relation '" + text + "'");
  return id;
}

std::string to_string(const Convention& c) {
  if (c.is_identity()) return "identity";
  std::string s;
  auto add = [&](const char* part) { s += (s.empty() ? "" : "+") + std::string(part); };
  if (c.phase_on_complement) add("complement");
  if (c.conjugate_xi) add("conjugate");
  if (c.negate_w) add("negate");
  return s;
}

Convention parse_convention(const std::string& text) {
  Convention c;
  if (text == "identity") return c;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('+', pos);
    if (end == std::string::npos) end = text.size();
    std::string part = text.substr(pos, end - pos);
    if (part == "complement") {
      c.phase_on_complement = true;
    } else if (part == "conjugate") {
      c.conjugate_xi = true;
    } else if (part == "negate") {
      c.negate_w = true;
    } else {
      throw ConfigError("unknown convention '" + text +
                        "' (expected identity or complement/conjugate/negate joined by '+')");
    }
    pos = end + 1;
  }
  return c;
}

std::vector<RelationId> verlinde_relations(int rho, int r) {
  std::vector<RelationId> out;
  std::vector<int> as;
  for (int a = -rho; a <= 0; ++a) as.push_back(a);
  if (std::abs(r) < rho) {
    for (int a = -rho - r; a <= -r; ++a) {
      if (std::find(as.begin(), as.end(), a) == as.end()) as.push_back(a);
    }
  }
  std::sort(as.begin(), as.end());
  for (int a : as) out.push_back(RelationId::verlinde_plain(a));
  for (int l = 1; l < rho; ++l) {
    for (int i = -rho; i <= 0; ++i) out.push_back(RelationId::verlinde_phased(l, i));
  }
  return out;
}

std::vector<RelationId> segre_relations(int rho, int s) {
  std::vector<RelationId> out;
  std::vector<int> as;
  for (int a = -rho; a <= 0; ++a) as.push_back(a);
  if (in_range(s, 1, 2 * rho - 1)) {
    for (int a = -s; a <= -s + rho; ++a) {
      if (std::find(as.begin(), as.end(), a) == as.end()) as.push_back(a);
    }
  }
  std::sort(as.begin(), as.end());
  for (int a : as) out.push_back(RelationId::segre_plain(a));
  for (int a = -rho; a <= 0; ++a) {
    for (int n = 0; n <= rho + a; ++n) out.push_back(RelationId::segre_exp_lower(a, n));
  }
  if (in_range(s, 1, 2 * rho - 2)) {
    for (int a = -s; a <= rho - s; ++a) {
      for (int n = 0; n <= rho - a - s; ++n) out.push_back(RelationId::segre_exp_upper(a, n));
    }
  }
  for (int l = 1; l < rho; ++l) {
    for (int a = -l + 1; a <= rho - l - 1; ++a) {
      out.push_back(RelationId::segre_phased(l, a));
      const int bound = std::min(l * (rho - l - a), (l + a) * (rho - l));
      for (int n = 1; n < bound; ++n) out.push_back(RelationId::segre_phased_moment(l, a, n));
    }
  }
  return out;
}

std::vector<RelationId> default_relations(FamilyKind kind, int rho, int param) {
  return kind == FamilyKind::verlinde ? verlinde_relations(rho, param) : segre_relations(rho, param);
}

void validate_relation(const RelationId& id, FamilyKind kind, int rho, int param) {
  const bool verl = id.is_verlinde();
  if (verl != (kind == FamilyKind::verlinde)) {
    out_of_range(id, std::string("does not apply to a ") + to_string(kind) + " family");
  }
  if (verl && std::abs(param) > rho) out_of_range(id, "needs |r| <= rho");
  if (!verl && !in_range(param, 0, 2 * rho)) out_of_range(id, "needs 0 <= s <= 2 rho");
  const int a = id.shift;
  switch (id.kind) {
    case RelationKind::verlinde_plain:
      if (!in_range(a, -rho, 0) && !(std::abs(param) < rho && in_range(a, -rho - param, -param))) {
        out_of_range(id, "a must lie in [-rho, 0] (or [-rho-r, -r] when |r| < rho)");
      }
      break;
    case RelationKind::verlinde_phased:
      if (!in_range(id.phase_power, 1, rho - 1) || !in_range(a, -rho, 0)) out_of_range(id, "needs 1 <= l < rho, -rho <= i <= 0");
      break;
    case RelationKind::segre_plain:
      if (!in_range(a, -rho, 0) && !(in_range(param, 1, 2 * rho - 1) && in_range(a, -param, rho - param))) {
        out_of_range(id, "a must lie in [-rho, 0] (or [-s, rho-s] when 1 <= s < 2 rho)");
      }
      break;
    case RelationKind::segre_exp_lower:
      if (!in_range(a, -rho, 0) || !in_range(id.layer, 0, rho + a)) out_of_range(id, "needs -rho <= a <= 0, n <= rho + a");
      break;
    case RelationKind::segre_exp_upper:
      if (!in_range(param, 1, 2 * rho - 2) || !in_range(a, -param, rho - param) || !in_range(id.layer, 0, rho - a - param)) {
        out_of_range(id, "needs 1 <= s <= 2 rho - 2, -s <= a <= rho - s, n <= rho - a - s");
      }
      break;
    case RelationKind::segre_phased_moment:
    case RelationKind::segre_phased: {
      if (!in_range(id.phase_power, 1, rho - 1) || !in_range(a, -id.phase_power + 1, rho - id.phase_power - 1)) {
        out_of_range(id, "needs 1 <= l < rho, 1-l <= a <= rho-l-1");
      }
      const int bound = std::min(id.phase_power * (rho - id.phase_power - a), (id.phase_power + a) * (rho - id.phase_power));
      if (id.kind == RelationKind::segre_phased_moment && !in_range(id.layer, 0, bound - 1)) {
        out_of_range(id, "n must be below min(l(rho-l-a), (l+a)(rho-l))");
      }
      break;
    }
  }
}

Rational relation_exponent(const RelationId& id, int rho, int param) {
  switch (id.kind) {
    case RelationKind::verlinde_phased:
    case RelationKind::segre_phased_moment:
    case RelationKind::segre_phased:
      return Rational(id.shift) + ratio((id.phase_power - rho) * param, rho);
    default:
      return Rational(id.shift);
  }
}

Series relation_rhs(const RelationId& id, int rho, int param, int order, const Rational& prefactor) {
  auto ctx = cyc_context(rho);
  const Series zero = Series::constant(CycNum(ctx), order);
  if (id.is_verlinde()) {
    const Rational r(param);
    Series one_plus_v2 = one_plus_v2_in_w(rho, r, order);
    const Rational a = relation_exponent(id, rho, param);
    Series base = pow(one_plus_v2, binom_a1_2(a));
    if (id.kind == RelationKind::verlinde_plain) return base;
    const int i = id.shift;
    if (i != 0 && i != -rho) return zero;
    const int deg = id.phase_power * (rho - id.phase_power);
    CycNum coef(ctx, Rational((i == 0 && deg % 2 != 0) ? -1 : 1));
    Series out = Series::monomial(coef, deg, order) * base;
    if ((i == 0 && param == -rho) || (i == -rho && param == rho)) {
      Series v2 = one_plus_v2 - Series::constant(CycNum(ctx, Rational(1)), order);
      Series den = Series::constant(CycNum(ctx, Rational(1)), order) - pow_int(-v2, rho);
      out = out * pow_int(den, -(rho - id.phase_power));
    }
    return out;
  }
  const Rational s(param);
  switch (id.kind) {
    case RelationKind::segre_phased:
    case RelationKind::segre_phased_moment:
      return zero;
    default:
      break;
  }
  SegreRhsParts parts = segre_parts(rho, s, order);
  const Rational a(id.shift);
  Series base = segre_plain_rhs(parts, a, s, rho);
  if (id.kind == RelationKind::segre_plain) return base;
  Series layer = base * gaussian_layer(parts.L2_exponent, parts.t2, a, id.layer);
  if (id.kind == RelationKind::segre_exp_upper) layer *= prefactor;
  return layer;
}

Series eval_verlinde_relation(const Family& family, const RelationId& id, const Convention& conv) {
  if (!id.is_verlinde()) throw DomainError(to_string(id) + " is not a Verlinde-family relation");
  return eval_relation(family, id, conv);
}

Series eval_segre_relation(const Family& family, const RelationId& id, const Convention& conv,
                           const Rational& prefactor) {
  if (id.is_verlinde()) throw DomainError(to_string(id) + " is not a Segre-family relation");
  return eval_relation(family, id, conv, prefactor);
}

Series blowup_ratio(const Family& family, int l, int m_or_k, const Rational& x) {
  const int rho = family.rho;
  const int n = family.order();
  auto ctx = cyc_context(rho);
  Series sum = Series::constant(CycNum(ctx), n);
  const Rational k(m_or_k);
  for (SubsetMask J = 0; J < subset_count(rho); ++J) {
    CycNum phase = CycNum::root_power(ctx, 4LL * l * subset_norm(J));
    // alpha + k O_D(D) pairs to -k with the new basic classes, hence Y_J^{-k} on the Segre side
    const Rational y_exp = family.kind == FamilyKind::segre ? Rational(-k) : k;
    Series term = pow(family.base[J], y_exp) * inverse(family.weight[J]);
    if (family.kind == FamilyKind::segre && !is_zero(x)) term = term * exp(family.linear[J] * x);
    sum += term * phase;
  }
  if (family.kind == FamilyKind::verlinde) {
    Series one_plus_v2 = one_plus_v2_in_w(rho, Rational(family.parameter), n);
    return pow(one_plus_v2, -binom_a1_2(k)) * sum;
  }
  const Rational s(family.parameter);
  SegreRhsParts p = segre_parts(rho, s, n);
  Series gauss = exp(p.L2_exponent * (-x * x) + p.t2 * (k * x));
  return gauss * pow(p.p1, k * (k - s + rho) / 2) * pow(p.p2, -k * (k - s) / 2) * sum;
}

bool ResidualReport::clean() const {
  return std::all_of(entries.begin(), entries.end(), [](const RelationResult& r) { return r.clean(); });
}

long long ResidualReport::total_vanishing() const {
  long long t = 0;
  for (const auto& e : entries) t += e.first_nonzero.value_or(order + 1);
  return t;
}

const RelationResult* ResidualReport::find(const RelationId& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

ResidualReport verify_with(RelationEvaluator<CycNum>& ev, const std::vector<RelationId>& relations,
                           const Convention& conv) {
  ResidualReport rep;
  rep.order = ev.order();
  rep.convention = conv;
  const int rho = ev.family().rho;
  for (const auto& id : relations) {
    RelationResult res;
    res.id = id;
    res.first_nonzero = first_nonzero(ev.residual(id, conv));
    if (id.kind == RelationKind::segre_exp_upper && res.first_nonzero) {
      auto alt = first_nonzero(ev.residual(id, conv, Rational(rho)));
      if (!alt || *alt > *res.first_nonzero) {
        res.first_nonzero = alt;
        res.prefactor = rho;
      }
    }
    rep.entries.push_back(res);
  }
  return rep;
}

}  // namespace

ResidualReport verify_family(const Family& family, const std::vector<RelationId>& relations,
                             const Convention& conv) {
  RelationEvaluator<CycNum> ev(family);
  return verify_with(ev, relations, conv);
}

ScanResult convention_scan(const Family& family, const std::vector<RelationId>& relations) {
  ScanResult out;
  RelationEvaluator<CycNum> ev(family);
  std::vector<ResidualReport> reports;
  for (int k = 0; k < 8; ++k) {
    reports.push_back(verify_with(ev, relations, Convention::from_index(k)));
    if (reports.back().clean()) out.clean_conventions.push_back(Convention::from_index(k));
  }
  if (!out.clean_conventions.empty()) {
    out.chosen = out.clean_conventions.front();  // index 0 is the identity
  } else {
    out.warning = true;
    int best = 0;
    for (int k = 1; k < 8; ++k) {
      if (reports[static_cast<std::size_t>(k)].total_vanishing() >
          reports[static_cast<std::size_t>(best)].total_vanishing()) {
        best = k;
      }
    }
    out.chosen = Convention::from_index(best);
  }
  out.report = reports[static_cast<std::size_t>(out.chosen.index())];
  return out;
}

}  // namespace vb
