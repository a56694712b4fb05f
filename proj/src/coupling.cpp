#include "sccs/coupling.hpp"

#include <cmath>

namespace sccs {

namespace {

std::size_t card_of(const JointDistribution& j, const std::string& name) {
  return j.variables()[j.var_index(name)].card;
}

void require_vars(const JointDistribution& j, std::initializer_list<std::string> names,
                  const char* what) {
  for (const auto& n : names)
    if (!j.has_variable(n))
      throw ArgumentError(std::string(what) + ": missing variable '" + n + "'");
}

/// Permute src's variables into the order given by vars (names must match).
JointDistribution reorder_to(const JointDistribution& src,
                             const std::vector<Variable>& vars) {
  if (src.variables() == vars) return src;
  std::vector<std::string> names;
  names.reserve(vars.size());
  for (const auto& v : vars) names.push_back(v.name);
  return src.marginal(std::span<const std::string>(names));
}

}  // namespace

AuxiliaryCoupling::AuxiliaryCoupling(JointDistribution joint, JointDistribution target,
                                     double marginal_tol, unsigned cardinality_slack)
    : joint_(std::move(joint)),
      target_(std::move(target)),
      marginal_tol_(marginal_tol),
      slack_(cardinality_slack) {
  require_vars(joint_, {"X", "Y", "Z", "U", "V"}, "coupling");
  require_vars(target_, {"X", "Y", "Z"}, "coupling target");
  if (target_.arity() != 3)
    throw ArgumentError("coupling target must have exactly the variables X,Y,Z");
  const auto m = joint_.marginal({"X", "Y", "Z"});
  target_ = reorder_to(target_, m.variables());
  const double dev = total_variation(m, target_);
  if (dev > marginal_tol_)
    throw ConstraintError("coupling marginal on (X,Y,Z) misses the target by TV " +
                          std::to_string(dev));
  const std::size_t cx = card_of(joint_, "X"), cy = card_of(joint_, "Y"),
                    cz = card_of(joint_, "Z"), cu = card_of(joint_, "U"),
                    cv = card_of(joint_, "V");
  if (cv > cx * cy * cz + slack_ || cu > cx * cy * cz * cv + slack_)
    throw ConstraintError("coupling exceeds the auxiliary cardinality bounds");
}

RatePoint rate_triple(const AuxiliaryCoupling& aux) {
  const auto& j = aux.joint();
  const double r0 = j.mutual_information({"X", "Y", "Z"}, {"U", "V"});
  const double r1 = j.mutual_information({"X"}, {"U", "V"});
  const double r2 = j.mutual_information({"X"}, {"V"});
  return RatePoint(r0, {r1, r2});
}

MembershipReport check_membership_D(const AuxiliaryCoupling& aux, double tol) {
  const auto& j = aux.joint();
  MembershipReport rep;
  {
    const auto m = j.marginal({"X", "Y", "Z"});
    rep.marginal_dev = total_variation(m, reorder_to(aux.target(), m.variables()));
    rep.marginal_ok = rep.marginal_dev <= std::max(tol, aux.marginal_tolerance());
  }
  rep.chain1_dev = j.conditional_mutual_information({"X"}, {"U", "V"}, {"Y"});
  rep.chain2_dev = j.conditional_mutual_information({"X", "Y", "U"}, {"V"}, {"Z"});
  const std::size_t cx = card_of(j, "X"), cy = card_of(j, "Y"), cz = card_of(j, "Z"),
                    cu = card_of(j, "U"), cv = card_of(j, "V");
  rep.cardinality_ok = cv <= cx * cy * cz + aux.cardinality_slack() &&
                       cu <= cx * cy * cz * cv + aux.cardinality_slack();
  const double h_v_given_u = j.entropy({"U", "V"}) - j.entropy({"U"});
  rep.functional_v_of_u = h_v_given_u <= tol;
  return rep;
}

VariationRates variation_rates(const JointDistribution& joint, VariationRegion which,
                               double tol, unsigned cardinality_slack) {
  VariationRates out;
  if (which == VariationRegion::kThm4Relay) {
    require_vars(joint, {"X", "Z", "U"}, "relay coupling");
    const double dev = joint.conditional_mutual_information({"X"}, {"U"}, {"Z"});
    if (dev > tol)
      throw ConstraintError("relay coupling violates X - U - Z (I(X;Z|U) = " +
                            std::to_string(dev) + ")");
    const std::size_t cu = card_of(joint, "U");
    if (cu > card_of(joint, "X") + card_of(joint, "Z") + cardinality_slack - 1)
      throw ConstraintError("relay coupling exceeds |U| <= |X|+|Z|+2");
    out.point = RatePoint(0.0, {joint.mutual_information({"X"}, {"U"}),
                                joint.mutual_information({"Z"}, {"U"})});
    return out;
  }
  require_vars(joint, {"X", "Y", "Z", "U", "V"}, "coupling");
  const double c1 = joint.conditional_mutual_information({"X"}, {"U", "V"}, {"Y"});
  if (c1 > tol)
    throw ConstraintError("coupling violates X - (U,V) - Y (I(X;Y|U,V) = " +
                          std::to_string(c1) + ")");
  const double c2 = joint.conditional_mutual_information({"X", "Y", "U"}, {"V"}, {"Z"});
  if (c2 > tol)
    throw ConstraintError("coupling violates (X,Y,U) - V - Z (I(X,Y,U;Z|V) = " +
                          std::to_string(c2) + ")");
  const double i_xyz_uv = joint.mutual_information({"X", "Y", "Z"}, {"U", "V"});
  const double i_x_uv = joint.mutual_information({"X"}, {"U", "V"});
  const double i_x_v = joint.mutual_information({"X"}, {"V"});
  switch (which) {
    case VariationRegion::kThm2Inner:
      out.point = RatePoint(joint.mutual_information({"X", "Y", "Z"}, {"V"}),
                            {i_x_uv, i_x_v});
      out.sum_r1_r0 = i_xyz_uv + i_x_v;
      out.has_sum = true;
      break;
    case VariationRegion::kThm2Outer:
      out.point = RatePoint(joint.mutual_information({"X", "Y", "Z"}, {"V"}),
                            {i_x_uv, i_x_v});
      out.sum_r1_r0 = i_xyz_uv;
      out.has_sum = true;
      break;
    case VariationRegion::kThm3:
      out.point = RatePoint(joint.mutual_information({"X", "Y", "Z"}, {"U"}),
                            {joint.mutual_information({"X"}, {"U"}), i_x_v});
      break;
    default:
      throw ArgumentError("unknown variation region");
  }
  return out;
}

std::vector<double> general_cascade_rates(const JointDistribution& joint, unsigned m,
                                          double tol) {
  if (m < 3) throw ArgumentError("general cascade needs m >= 3 nodes");
  const unsigned L = m - 1;
  std::vector<std::string> ys(L), us(L);
  for (unsigned i = 0; i < L; ++i) {
    ys[i] = "Y" + std::to_string(i + 1);
    us[i] = "U" + std::to_string(i + 1);
  }
  require_vars(joint, {"X"}, "cascade coupling");
  for (unsigned i = 0; i < L; ++i) {
    if (!joint.has_variable(ys[i]) || !joint.has_variable(us[i]))
      throw ArgumentError("cascade coupling: missing Y/U variables for node " +
                          std::to_string(i + 2));
  }

  auto tail = [&](unsigned i) {
    std::vector<std::string> t;
    for (unsigned k = i; k < L; ++k) t.push_back(us[k]);
    return t;
  };
  const std::vector<std::string> just_x = {"X"};

  {
    const auto all_u = tail(0);
    const std::vector<std::string> y1 = {ys[0]};
    const double dev = joint.conditional_mutual_information(
        std::span<const std::string>(just_x), std::span<const std::string>(all_u),
        std::span<const std::string>(y1));
    if (dev > tol)
      throw ConstraintError("cascade coupling violates X - U_1.. - Y1 (dev " +
                            std::to_string(dev) + ")");
  }
  for (unsigned j = 1; j < L; ++j) {
    std::vector<std::string> left = {"X"};
    for (unsigned k = 0; k < j; ++k) {
      left.push_back(ys[k]);
      left.push_back(us[k]);
    }
    const auto mid = tail(j);
    const std::vector<std::string> yj = {ys[j]};
    const double dev = joint.conditional_mutual_information(
        std::span<const std::string>(left), std::span<const std::string>(mid),
        std::span<const std::string>(yj));
    if (dev > tol)
      throw ConstraintError("cascade coupling violates the chain into Y" +
                            std::to_string(j + 1) + " (dev " + std::to_string(dev) +
                            ")");
  }
  for (unsigned i = 0; i < L; ++i) {
    const auto t = tail(i);
    const std::vector<std::string> ui = {us[i]};
    const double h = joint.entropy(std::span<const std::string>(t)) -
                     joint.entropy(std::span<const std::string>(ui));
    if (h > tol)
      throw ConstraintError("cascade coupling violates H(U" + std::to_string(i + 1) +
                            "..|U" + std::to_string(i + 1) + ") = 0 (value " +
                            std::to_string(h) + ")");
  }
  {
    unsigned long long ybound = card_of(joint, "X");
    for (unsigned k = 0; k < L; ++k) ybound *= card_of(joint, ys[k]);
    for (unsigned i = 0; i < L; ++i) {
      unsigned long long bound = ybound;
      for (unsigned k = i + 1; k < L; ++k) bound *= card_of(joint, us[k]);
      bound += m + i - 1;  // m + (i+1) - 2, i zero-based
      if (card_of(joint, us[i]) > bound)
        throw ConstraintError("cascade coupling exceeds the |U" +
                              std::to_string(i + 1) + "| cardinality bound");
    }
  }

  std::vector<double> rates(m, 0.0);
  std::vector<std::string> xy = {"X"};
  for (unsigned k = 0; k < L; ++k) xy.push_back(ys[k]);
  const auto all_u = tail(0);
  rates[0] = joint.mutual_information(std::span<const std::string>(xy),
                                      std::span<const std::string>(all_u));
  for (unsigned i = 0; i < L; ++i) {
    const auto t = tail(i);
    rates[i + 1] = joint.mutual_information(std::span<const std::string>(just_x),
                                            std::span<const std::string>(t));
  }
  return rates;
}

// ---------------------------------------------------------------------------
// Presets

JointDistribution task_target(unsigned m) {
  if (m < 3) throw ArgumentError("task target needs m >= 3");
  const std::size_t mm = m;
  std::vector<double> mass(mm * mm * mm, 0.0);
  const double p = 1.0 / (static_cast<double>(m) * (m - 1) * (m - 2));
  for (std::size_t x = 0; x < mm; ++x)
    for (std::size_t y = 0; y < mm; ++y)
      for (std::size_t z = 0; z < mm; ++z)
        if (x != y && y != z && x != z) mass[(x * mm + y) * mm + z] = p;
  double s = 0;
  for (double v : mass) s += v;
  for (double& v : mass) v /= s;
  return JointDistribution::dense({{"X", mm}, {"Y", mm}, {"Z", mm}}, std::move(mass));
}

JointDistribution scatter_target(unsigned m) {
  if (m < 2) throw ArgumentError("scatter target needs m >= 2");
  const std::size_t mm = m;
  std::vector<double> mass(mm * mm, 0.0);
  const double p = 1.0 / (static_cast<double>(m) * (m - 1));
  for (std::size_t x = 0; x < mm; ++x)
    for (std::size_t z = 0; z < mm; ++z)
      if (x != z) mass[x * mm + z] = p;
  double s = 0;
  for (double v : mass) s += v;
  for (double& v : mass) v /= s;
  return JointDistribution::dense({{"X", mm}, {"Z", mm}}, std::move(mass));
}

JointDistribution binary_chain_target(double p, double q) {
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1))
    throw ArgumentError("crossover probabilities must lie in [0,1]");
  std::vector<double> mass(8);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t z = 0; z < 2; ++z)
        mass[4 * x + 2 * y + z] = 0.5 * (y != x ? p : 1 - p) * (z != y ? q : 1 - q);
  return JointDistribution::dense({{"X", 2}, {"Y", 2}, {"Z", 2}}, std::move(mass));
}

JointDistribution coupling_from_yz(const JointDistribution& target) {
  require_vars(target, {"X", "Y", "Z"}, "coupling_from_yz");
  const std::size_t cx = card_of(target, "X"), cy = card_of(target, "Y"),
                    cz = card_of(target, "Z");
  std::vector<Variable> vars = {{"X", cx}, {"Y", cy}, {"Z", cz}, {"U", cy}, {"V", cz}};
  std::vector<double> mass(cx * cy * cz * cy * cz, 0.0);
  std::vector<std::size_t> idx(3);
  const auto tgt = target.marginal({"X", "Y", "Z"});
  tgt.for_each([&](JointDistribution::Index li, double p) {
    tgt.unpack(li, idx);
    const std::size_t x = idx[0], y = idx[1], z = idx[2];
    mass[(((x * cy + y) * cz + z) * cy + y) * cz + z] = p;
  });
  return JointDistribution::dense(std::move(vars), std::move(mass));
}

JointDistribution diamond_coupling(double a, double b, double e, double f) {
  for (double v : {a, b, e, f})
    if (!(v >= 0 && v <= 1)) throw ArgumentError("crossover outside [0,1]");
  auto bsc = [](double p, std::size_t in, std::size_t out) {
    return in == out ? 1 - p : p;
  };
  std::vector<double> mass(32, 0.0);
  for (std::size_t v = 0; v < 2; ++v)
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
          for (std::size_t z = 0; z < 2; ++z)
            mass[(((x * 2 + y) * 2 + z) * 2 + u) * 2 + v] =
                0.5 * bsc(e, v, u) * bsc(a, v, x) * bsc(f, u, y) * bsc(b, v, z);
  return JointDistribution::dense({{"X", 2}, {"Y", 2}, {"Z", 2}, {"U", 2}, {"V", 2}},
                                  std::move(mass));
}

JointDistribution tail_coupling(const JointDistribution& target) {
  const std::size_t L = target.arity() - 1;
  if (L < 1) throw ArgumentError("tail coupling needs X plus at least one output");
  require_vars(target, {"X"}, "tail_coupling");
  std::vector<std::string> ys(L);
  std::vector<std::size_t> ycard(L);
  for (std::size_t i = 0; i < L; ++i) {
    ys[i] = "Y" + std::to_string(i + 1);
    if (!target.has_variable(ys[i]))
      throw ArgumentError("tail_coupling: target must use variables X, Y1..Y" +
                          std::to_string(L));
    ycard[i] = card_of(target, ys[i]);
  }
  std::vector<std::size_t> ucard(L, 1);  // u_i packs (y_i, ..., y_L) row-major
  for (std::size_t i = L; i-- > 0;)
    ucard[i] = ycard[i] * (i + 1 < L ? ucard[i + 1] : 1);

  std::vector<Variable> vars;
  vars.push_back({"X", card_of(target, "X")});
  for (std::size_t i = 0; i < L; ++i) vars.push_back({ys[i], ycard[i]});
  for (std::size_t i = 0; i < L; ++i)
    vars.push_back({"U" + std::to_string(i + 1), ucard[i]});

  std::vector<std::string> order = {"X"};
  for (const auto& y : ys) order.push_back(y);
  const auto tgt = target.marginal(std::span<const std::string>(order));

  std::unordered_map<JointDistribution::Index, double> mass;
  std::vector<std::size_t> idx(1 + L), full(1 + 2 * L);
  tgt.for_each([&](JointDistribution::Index li, double p) {
    tgt.unpack(li, idx);
    for (std::size_t i = 0; i < 1 + L; ++i) full[i] = idx[i];
    for (std::size_t i = 0; i < L; ++i) {
      std::size_t u = 0;
      for (std::size_t k = i; k < L; ++k) u = u * ycard[k] + idx[1 + k];
      full[1 + L + i] = u;
    }
    JointDistribution::Index lin = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) lin = lin * vars[i].card + full[i];
    mass[lin] = p;
  });
  unsigned __int128 total = 1;
  for (const auto& v : vars) total *= v.card;
  if (total <= kDenseStateLimit) {
    std::vector<double> dense(static_cast<std::size_t>(total), 0.0);
    for (const auto& [k, v] : mass) dense[static_cast<std::size_t>(k)] = v;
    return JointDistribution::dense(std::move(vars), std::move(dense));
  }
  return JointDistribution::sparse(std::move(vars), std::move(mass));
}

}  // namespace sccs
