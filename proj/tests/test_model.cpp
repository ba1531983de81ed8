#include "doctest.h"
#include "model.hpp"
#include "test_support.hpp"

using namespace hyplan;

namespace {

PlanningModel small_model() {
  PlanningModel m;
  int a = m.add_var("a", 0, 10, VarKind::Continuous, 1.5);
  int b = m.add_var("b", 0, 1, VarKind::Binary, -2.0);
  int c = m.add_var("c", -kInf, kInf, VarKind::Continuous);
  m.vars[size_t(c)].beta_of = a;
  m.add_row("cap", RowSense::LE, 5.0, {{a, 1.0}, {b, 2.0}});
  m.add_row("link", RowSense::EQ, 0.0, {{c, 1.0}, {a, -0.5}});
  ConeDef cone;
  cone.tag = "k";
  cone.scale = 0.5;
  cone.bound.add(a, 1.0).constant = 2.0;
  LinExpr e1;
  e1.add(c, 1.0);
  LinExpr e2;
  e2.add(b, 3.0).constant = -1.0;
  cone.vec = {e1, e2};
  m.add_cone(cone);
  m.obj_constant = 7.25;
  return m;
}

}  // namespace

TEST_CASE("model text export reimports bit-identically") {
  PlanningModel m = small_model();
  std::string t1 = m.export_text();
  PlanningModel back = PlanningModel::import_text(t1);
  CHECK(back.export_text() == t1);
  CHECK(back.vars[2].beta_of == 0);
  CHECK(back.obj_constant == doctest::Approx(7.25));
  CHECK(back.cones.size() == 1);
  CHECK(back.cones[0].vec.size() == 2);
}

TEST_CASE("model stats count kinds, senses, and tags") {
  PlanningModel m = small_model();
  ModelStats st = m.stats();
  CHECK(st.vars == 3);
  CHECK(st.binary == 1);
  CHECK(st.continuous == 2);
  CHECK(st.rows == 2);
  CHECK(st.eq_rows == 1);
  CHECK(st.ineq_rows == 1);
  CHECK(st.cones == 1);
  CHECK(st.rows_by_tag.at("cap") == 1);
  CHECK(st.cones_by_tag.at("k") == 1);
}

TEST_CASE("expression evaluation is linear in the values") {
  PlanningModel m = small_model();
  std::vector<double> x{2.0, 1.0, 1.0};
  CHECK(m.row_activity(m.rows[0], x) == doctest::Approx(4.0));
  CHECK(m.eval(m.cones[0].bound, x) == doctest::Approx(4.0));
  CHECK(m.find_var("b") == 1);
  CHECK(m.find_var("zzz") == -1);
}

TEST_CASE("assembled models are bit-identical across rebuilds") {
  ModelBundle b1 = testing::tiny_bundle(true, true);
  ModelBundle b2 = testing::tiny_bundle(true, true);
  CHECK(b1.model.export_text() == b2.model.export_text());
}
