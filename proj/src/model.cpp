#include "model.hpp"

#include <sstream>

#include "util.hpp"

namespace hyplan {

int PlanningModel::add_var(std::string name, double lb, double ub, VarKind kind, double obj) {
  VarDef v;
  v.name = std::move(name);
  v.lb = lb;
  v.ub = ub;
  v.kind = kind;
  v.obj = obj;
  vars.push_back(std::move(v));
  name_index_.clear();
  return int(vars.size()) - 1;
}

int PlanningModel::add_beta_var(std::string name, int of_col) {
  int col = add_var(std::move(name), -kInf, kInf, VarKind::Continuous, 0.0);
  vars[size_t(col)].beta_of = of_col;
  return col;
}

void PlanningModel::add_row(std::string tag, RowSense sense, double rhs,
                            std::vector<LinTerm> terms) {
  RowDef r;
  r.tag = std::move(tag);
  r.sense = sense;
  r.rhs = rhs;
  r.terms = std::move(terms);
  rows.push_back(std::move(r));
}

void PlanningModel::add_cone(ConeDef cone) { cones.push_back(std::move(cone)); }

int PlanningModel::find_var(const std::string& name) const {
  if (name_index_.size() != vars.size()) {
    name_index_.clear();
    for (size_t i = 0; i < vars.size(); ++i) name_index_[vars[i].name] = int(i);
  }
  auto it = name_index_.find(name);
  return it == name_index_.end() ? -1 : it->second;
}

double PlanningModel::eval(const LinExpr& e, const std::vector<double>& x) const {
  double v = e.constant;
  for (const auto& t : e.terms) v += t.coef * x[size_t(t.col)];
  return v;
}

double PlanningModel::row_activity(const RowDef& r, const std::vector<double>& x) const {
  double v = 0;
  for (const auto& t : r.terms) v += t.coef * x[size_t(t.col)];
  return v;
}

ModelStats PlanningModel::stats() const {
  ModelStats s;
  s.vars = int(vars.size());
  for (const auto& v : vars) {
    switch (v.kind) {
      case VarKind::Continuous: ++s.continuous; break;
      case VarKind::Binary: ++s.binary; break;
      case VarKind::Integer: ++s.integer; break;
    }
  }
  s.rows = int(rows.size());
  for (const auto& r : rows) {
    if (r.sense == RowSense::EQ) ++s.eq_rows;
    else ++s.ineq_rows;
    s.nnz += (long long)r.terms.size();
    ++s.rows_by_tag[r.tag];
  }
  s.cones = int(cones.size());
  for (const auto& c : cones) ++s.cones_by_tag[c.tag];
  return s;
}

namespace {

char sense_char(RowSense s) {
  switch (s) {
    case RowSense::LE: return 'L';
    case RowSense::GE: return 'G';
    case RowSense::EQ: return 'E';
  }
  return '?';
}

char kind_char(VarKind k) {
  switch (k) {
    case VarKind::Continuous: return 'C';
    case VarKind::Binary: return 'B';
    case VarKind::Integer: return 'I';
  }
  return '?';
}

void write_expr(std::ostringstream& out, const LinExpr& e) {
  out << format_double(e.constant) << ' ' << e.terms.size();
  for (const auto& t : e.terms) out << ' ' << t.col << ' ' << format_double(t.coef);
}

}  // namespace

std::string PlanningModel::export_text() const {
  std::ostringstream out;
  out << "HYPLAN-MODEL 1\n";
  out << "objective_constant " << format_double(obj_constant) << "\n";
  out << "vars " << vars.size() << "\n";
  for (const auto& v : vars) {
    out << "v " << v.name << ' ' << kind_char(v.kind) << ' ' << format_double(v.lb) << ' '
        << format_double(v.ub) << ' ' << format_double(v.obj) << ' ' << v.beta_of << "\n";
  }
  out << "rows " << rows.size() << "\n";
  for (const auto& r : rows) {
    out << "r " << r.tag << ' ' << sense_char(r.sense) << ' ' << format_double(r.rhs) << ' '
        << r.terms.size();
    for (const auto& t : r.terms) out << ' ' << t.col << ' ' << format_double(t.coef);
    out << "\n";
  }
  out << "cones " << cones.size() << "\n";
  for (const auto& c : cones) {
    out << "k " << c.tag << ' ' << format_double(c.scale) << ' ' << c.vec.size() << "\n";
    std::ostringstream be;
    write_expr(be, c.bound);
    out << "b " << be.str() << "\n";
    for (const auto& e : c.vec) {
      std::ostringstream ee;
      write_expr(ee, e);
      out << "e " << ee.str() << "\n";
    }
  }
  out << "end\n";
  return out.str();
}

namespace {

struct Tok {
  std::istringstream in;
  explicit Tok(const std::string& s) : in(s) {}
  std::string word() {
    std::string w;
    if (!(in >> w)) fail_io("model text: unexpected end of input");
    return w;
  }
  double num() {
    double v;
    if (!(in >> v)) fail_io("model text: expected a number");
    return v;
  }
  long long inum() {
    long long v;
    if (!(in >> v)) fail_io("model text: expected an integer");
    return v;
  }
};

LinExpr read_expr(Tok& tok) {
  LinExpr e;
  e.constant = tok.num();
  long long n = tok.inum();
  for (long long i = 0; i < n; ++i) {
    int col = int(tok.inum());
    double coef = tok.num();
    e.terms.push_back({col, coef});
  }
  return e;
}

}  // namespace

PlanningModel PlanningModel::import_text(const std::string& text) {
  Tok tok(text);
  if (tok.word() != "HYPLAN-MODEL" || tok.word() != "1")
    fail_io("model text: bad header");
  PlanningModel m;
  if (tok.word() != "objective_constant") fail_io("model text: expected objective_constant");
  m.obj_constant = tok.num();
  if (tok.word() != "vars") fail_io("model text: expected vars");
  long long nv = tok.inum();
  for (long long i = 0; i < nv; ++i) {
    if (tok.word() != "v") fail_io("model text: expected var record");
    VarDef v;
    v.name = tok.word();
    std::string k = tok.word();
    v.kind = k == "C" ? VarKind::Continuous : k == "B" ? VarKind::Binary : VarKind::Integer;
    v.lb = tok.num();
    v.ub = tok.num();
    v.obj = tok.num();
    v.beta_of = int(tok.inum());
    m.vars.push_back(std::move(v));
  }
  if (tok.word() != "rows") fail_io("model text: expected rows");
  long long nr = tok.inum();
  for (long long i = 0; i < nr; ++i) {
    if (tok.word() != "r") fail_io("model text: expected row record");
    RowDef r;
    r.tag = tok.word();
    std::string s = tok.word();
    r.sense = s == "L" ? RowSense::LE : s == "G" ? RowSense::GE : RowSense::EQ;
    r.rhs = tok.num();
    long long n = tok.inum();
    for (long long t = 0; t < n; ++t) {
      int col = int(tok.inum());
      double coef = tok.num();
      if (col < 0 || col >= int(m.vars.size())) fail_io("model text: row references unknown column");
      r.terms.push_back({col, coef});
    }
    m.rows.push_back(std::move(r));
  }
  if (tok.word() != "cones") fail_io("model text: expected cones");
  long long nk = tok.inum();
  for (long long i = 0; i < nk; ++i) {
    if (tok.word() != "k") fail_io("model text: expected cone record");
    ConeDef c;
    c.tag = tok.word();
    c.scale = tok.num();
    long long dim = tok.inum();
    if (tok.word() != "b") fail_io("model text: expected cone bound");
    c.bound = read_expr(tok);
    for (long long d = 0; d < dim; ++d) {
      if (tok.word() != "e") fail_io("model text: expected cone entry");
      c.vec.push_back(read_expr(tok));
    }
    m.cones.push_back(std::move(c));
  }
  if (tok.word() != "end") fail_io("model text: expected end");
  return m;
}

}  // namespace hyplan
