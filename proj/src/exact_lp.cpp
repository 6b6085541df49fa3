#include "polyskel/exact_lp.hpp"

#include <stdexcept>

namespace polyskel {

namespace {

struct Tableau {
  std::vector<RationalVector> rows;  // each of size ncols + 1 (last = rhs)
  RationalVector obj;                // reduced costs, last = objective value
  std::vector<std::size_t> basis;
  std::size_t ncols = 0;

  void pivot(std::size_t r, std::size_t c) {
    Rational p = rows[r][c];
    for (auto& x : rows[r])
      if (x != 0) x /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j <= ncols; ++j)
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
    }
    if (obj[c] != 0) {
      Rational f = obj[c];
      for (std::size_t j = 0; j <= ncols; ++j)
        if (rows[r][j] != 0) obj[j] -= f * rows[r][j];
    }
    basis[r] = c;
  }

  // Returns false when unbounded.
  bool optimize(std::size_t allowed_cols) {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j)
        if (obj[j] < 0) {
          enter = j;
          break;
        }
      if (enter == allowed_cols) return true;
      std::size_t leave = rows.size();
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][enter] <= 0) continue;
        Rational ratio = rows[i][ncols] / rows[i][enter];
        if (leave == rows.size() || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_maximize(const RationalVector& c, const std::vector<LinearConstraint>& constraints) {
  const std::size_t n = c.size();
  const std::size_t m = constraints.size();
  std::size_t slack_count = 0, art_count = 0;
  std::vector<LinearConstraint> cons = constraints;
  for (auto& k : cons) {
    if (k.a.size() != n) throw std::invalid_argument("lp: constraint width mismatch");
    if (k.b < 0) {
      for (auto& x : k.a) x = -x;
      k.b = -k.b;
      if (k.rel == Relation::le)
        k.rel = Relation::ge;
      else if (k.rel == Relation::ge)
        k.rel = Relation::le;
    }
    if (k.rel != Relation::eq) ++slack_count;
    if (k.rel != Relation::le) ++art_count;
  }
  Tableau t;
  t.ncols = n + slack_count + art_count;
  const std::size_t art_begin = n + slack_count;
  t.rows.assign(m, RationalVector(t.ncols + 1, Rational(0)));
  t.basis.assign(m, 0);
  std::size_t s = n, a = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = cons[i].a[j];
    t.rows[i][t.ncols] = cons[i].b;
    if (cons[i].rel == Relation::le) {
      t.rows[i][s] = 1;
      t.basis[i] = s++;
    } else {
      if (cons[i].rel == Relation::ge) t.rows[i][s++] = -1;
      t.rows[i][a] = 1;
      t.basis[i] = a++;
    }
  }

  // Phase 1: maximize minus the sum of artificials.
  t.obj.assign(t.ncols + 1, Rational(0));
  for (std::size_t j = art_begin; j < t.ncols; ++j) t.obj[j] = 1;
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] >= art_begin)
      for (std::size_t j = 0; j <= t.ncols; ++j) t.obj[j] -= t.rows[i][j];
  t.optimize(t.ncols);
  LpResult res;
  if (t.obj[t.ncols] < 0) {
    res.status = LpResult::Status::infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < t.rows.size();) {
    if (t.basis[i] < art_begin) {
      ++i;
      continue;
    }
    std::size_t col = art_begin;
    for (std::size_t j = 0; j < art_begin; ++j)
      if (t.rows[i][j] != 0) {
        col = j;
        break;
      }
    if (col == art_begin) {
      t.rows.erase(t.rows.begin() + static_cast<long>(i));
      t.basis.erase(t.basis.begin() + static_cast<long>(i));
      continue;
    }
    t.pivot(i, col);
    ++i;
  }

  // Phase 2.
  t.obj.assign(t.ncols + 1, Rational(0));
  for (std::size_t j = 0; j < n; ++j) t.obj[j] = -c[j];
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    Rational f = t.obj[t.basis[i]];
    if (f == 0) continue;
    for (std::size_t j = 0; j <= t.ncols; ++j)
      if (t.rows[i][j] != 0) t.obj[j] -= f * t.rows[i][j];
  }
  if (!t.optimize(art_begin)) {
    res.status = LpResult::Status::unbounded;
    return res;
  }
  res.status = LpResult::Status::optimal;
  res.value = t.obj[t.ncols];
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rows[i][t.ncols];
  return res;
}

namespace {

// maximize t subject to a.u >= t, u_i >= t, sum u = 1.
LpResult interior_lp(const std::vector<RationalVector>& rows, std::size_t m) {
  std::vector<LinearConstraint> cons;
  for (const auto& r : rows) {
    if (r.size() != m) throw std::invalid_argument("cone row width mismatch");
    RationalVector a(r);
    a.push_back(-1);
    cons.push_back({a, Relation::ge, 0});
  }
  for (std::size_t i = 0; i < m; ++i) {
    RationalVector a(m + 1, Rational(0));
    a[i] = 1;
    a[m] = -1;
    cons.push_back({a, Relation::ge, 0});
  }
  RationalVector sum(m + 1, Rational(1));
  sum[m] = 0;
  cons.push_back({sum, Relation::eq, 1});
  RationalVector obj(m + 1, Rational(0));
  obj[m] = 1;
  return lp_maximize(obj, cons);
}

}  // namespace

bool open_cone_nonempty(const std::vector<RationalVector>& rows, std::size_t m) {
  return open_cone_point(rows, m).has_value();
}

std::optional<RationalVector> open_cone_point(const std::vector<RationalVector>& rows,
                                              std::size_t m) {
  if (m == 0) return std::nullopt;
  LpResult r = interior_lp(rows, m);
  if (r.status != LpResult::Status::optimal || r.value <= 0) return std::nullopt;
  r.x.pop_back();
  return r.x;
}

std::vector<RationalVector> remove_redundant_rows(const std::vector<RationalVector>& rows,
                                                  std::size_t m) {
  std::vector<RationalVector> kept = rows;
  for (std::size_t j = 0; j < kept.size();) {
    std::vector<LinearConstraint> cons;
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (k != j) cons.push_back({kept[k], Relation::ge, 0});
    cons.push_back({RationalVector(m, Rational(1)), Relation::eq, 1});
    RationalVector neg(kept[j]);
    for (auto& x : neg) x = -x;
    LpResult r = lp_maximize(neg, cons);
    // min a_j.u = -max(-a_j.u); redundant when that minimum is >= 0.
    bool redundant = r.status == LpResult::Status::optimal && r.value <= 0;
    if (redundant)
      kept.erase(kept.begin() + static_cast<long>(j));
    else
      ++j;
  }
  return kept;
}

}  // namespace polyskel
