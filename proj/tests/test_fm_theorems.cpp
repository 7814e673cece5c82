#include <doctest.h>

#include "gpcap/fm_theorems.hpp"

using namespace gpcap;
using namespace gpcap::fm;

TEST_CASE("pair system: projection matches the three published bounds") {
  const VerifyReport rep = verify_pair_projection(true);
  CHECK(rep.targets_implied);
  CHECK(rep.projection_implied);
  CHECK(rep.core_matches_targets);
  REQUIRE(rep.core.size() == 3);
  // every projection row only involves R and atoms
  for (const auto& r : rep.projection.rows()) CHECK(r.form.vars.size() <= 1);
}

TEST_CASE("pair system: dropping the covering-sum constraint removes the 2R bound") {
  const VerifyReport rep = verify_pair_projection(false);
  CHECK(rep.targets_implied);
  CHECK(rep.core_matches_targets);
  REQUIRE(rep.core.size() == 2);

  // the 2R bound is no longer implied by the projection
  std::vector<LinForm> proj_forms;
  for (const auto& r : rep.projection.rows()) proj_forms.push_back(r.form);
  const Row two_r = pair_targets()[2];
  CHECK(!implied_by(two_r.form, proj_forms, pair_facts()).has_value());
}

TEST_CASE("pair system: collapsing satellites reduces to the single-receiver bounds") {
  const VerifyReport rep = verify_pair_reduction_to_common();
  CHECK(rep.targets_implied);
  CHECK(rep.projection_implied);
  CHECK(rep.core_matches_targets);
  CHECK(rep.core.size() == 2);
}

TEST_CASE("layered system: K=2 specializes to the pair system (entropy vocabulary)") {
  const System pair_h = expand_pair_atoms_to_entropies(build_pair_system(true));
  const System layered = build_layered_system(2);
  CHECK(pair_h.canonical_rows() == layered.canonical_rows());
}

TEST_CASE("layered system: K=1 projection is the hand-derived bound") {
  const VerifyReport rep = verify_layered_projection(1);
  CHECK(rep.targets_implied);
  CHECK(rep.projection_implied);
  CHECK(rep.core_matches_targets);
  REQUIRE(rep.core.size() == 1);
  // R < I(U,V1;Y1) - I(U;S) - [H(V1|U) - H(V1|U,S)]
  const LinForm& f = rep.core[0].form;
  CHECK(f.vars.at("R") == Rational(1));
  CHECK(f.atoms.at("I(U,V1;Y1)") == Rational(-1));
  CHECK(f.atoms.at("I(U;S)") == Rational(1));
  CHECK(f.atoms.at("H(V1|U)") == Rational(1));
  CHECK(f.atoms.at("H(V1|U,S)") == Rational(-1));
}

TEST_CASE("layered system: K=2 and K=3 projections imply every subset bound") {
  for (int k = 2; k <= 3; ++k) {
    CAPTURE(k);
    const System sys = build_layered_system(k);
    std::vector<std::string> order;
    for (int i = 1; i <= k; ++i) order.push_back("T" + std::to_string(i));
    order.push_back("T0");
    order.push_back("S0");
    for (int i = 1; i <= k; ++i) order.push_back("S" + std::to_string(i));
    const System proj = sys.eliminate(order);

    std::vector<LinForm> proj_forms;
    for (const auto& r : proj.rows()) proj_forms.push_back(r.form);
    for (const Row& target : layered_targets(k)) {
      auto cert = implied_by(target.form, proj_forms, {});
      REQUIRE(cert.has_value());
      CHECK(check_certificate(target.form, proj_forms, {}, *cert));
    }
  }
}

TEST_CASE("layered system: full verification for K=2 and K=3") {
  for (int k = 2; k <= 3; ++k) {
    CAPTURE(k);
    const VerifyReport rep = verify_layered_projection(k);
    CHECK(rep.targets_implied);
    CHECK(rep.projection_implied);
    CHECK(rep.core_matches_targets);
    CHECK(rep.core.size() == (1u << k) - 1);
  }
}

TEST_CASE("certificates: found multipliers are verified by exact recomputation") {
  const VerifyReport rep = verify_pair_projection(true);
  std::vector<LinForm> proj_forms;
  for (const auto& r : rep.projection.rows()) proj_forms.push_back(r.form);
  for (const Row& t : pair_targets()) {
    auto cert = implied_by(t.form, proj_forms, {});
    REQUIRE(cert.has_value());
    CHECK(check_certificate(t.form, proj_forms, {}, *cert));
  }
  // a strictly stronger bound than the projection admits has no certificate
  LinForm stronger = LinForm{}.add_var("R", 1).add_atom(atom::i_uv1y1, -1).add_atom(atom::i_us, 2);
  CHECK(!implied_by(stronger, proj_forms, pair_facts()).has_value());
}

TEST_CASE("exactness: module exposes rational-only arithmetic") {
  CHECK(kExactArithmetic);
  static_assert(std::is_same_v<decltype(LinForm{}.constant), Rational>);
}

TEST_CASE("layered system: component count range") {
  CHECK_THROWS_AS(build_layered_system(0), std::invalid_argument);
  CHECK_THROWS_AS(build_layered_system(7), std::invalid_argument);
  CHECK_NOTHROW(build_layered_system(6));
}
