#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbayes/exact_bayes.hpp"
#include "nbayes/schema.hpp"

namespace nbayes {

// Probability mass over (x, y, z) value triples, stored x-major.
class TripleJoint {
 public:
  TripleJoint(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<double> mass) : nx_(nx), ny_(ny), nz_(nz) {
    if (nx == 0 || ny == 0 || nz == 0) throw Error("triple joint variables need at least one value");
    if (mass.size() != nx * ny * nz) throw Error("triple joint mass has the wrong size");
    mass_ = normalized_masses(std::move(mass), "triple joint");
  }

  std::size_t x_size() const { return nx_; }
  std::size_t y_size() const { return ny_; }
  std::size_t z_size() const { return nz_; }
  const std::vector<double>& masses() const { return mass_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return mass_[(i * ny_ + j) * nz_ + k]; }

  // The same distribution with the roles of X and Y exchanged.
  TripleJoint swap_xy() const {
    std::vector<double> m(mass_.size());
    for (std::size_t i = 0; i < nx_; ++i)
      for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t k = 0; k < nz_; ++k) m[(j * nx_ + i) * nz_ + k] = (*this)(i, j, k);
    return TripleJoint(ny_, nx_, nz_, std::move(m));
  }

 private:
  std::size_t nx_, ny_, nz_;
  std::vector<double> mass_;
};

struct CiWitness {
  std::size_t x = 0, y = 0, z = 0;
  double p_x_given_yz = 0.0;  // P(X = x | Y = y, Z = z)
  double p_x_given_z = 0.0;   // P(X = x | Z = z)
};

struct CiResult {
  bool independent = true;
  std::optional<CiWitness> witness;  // set when independent is false
};

inline constexpr double kDefaultCiTolerance = 1e-9;

// Checks P(X|Y,Z) = P(X|Z) for every triple whose conditioning event (Y, Z)
// has positive probability; zero-probability events are skipped.
inline CiResult is_conditionally_independent(const TripleJoint& joint, double tol = kDefaultCiTolerance) {
  if (!(tol > 0.0)) throw Error("tolerance must be > 0");
  const std::size_t nx = joint.x_size(), ny = joint.y_size(), nz = joint.z_size();

  std::vector<double> pz(nz, 0.0), pxz(nx * nz, 0.0), pyz(ny * nz, 0.0);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        double p = joint(i, j, k);
        pz[k] += p;
        pxz[i * nz + k] += p;
        pyz[j * nz + k] += p;
      }

  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        if (!(pyz[j * nz + k] > 0.0)) continue;
        double lhs = joint(i, j, k) / pyz[j * nz + k];
        double rhs = pxz[i * nz + k] / pz[k];
        if (std::abs(lhs - rhs) > tol) return {false, CiWitness{i, j, k, lhs, rhs}};
      }
  return {true, std::nullopt};
}

// Projects a joint over several discrete variables onto three of them.
// `arities` lists every variable; `mass` is row-major over them.
inline TripleJoint marginalize_to_triple(const std::vector<std::size_t>& arities, const std::vector<double>& mass,
                                         std::size_t xv, std::size_t yv, std::size_t zv) {
  const std::size_t nv = arities.size();
  if (xv >= nv || yv >= nv || zv >= nv) throw Error("variable index out of range");
  if (xv == yv || xv == zv || yv == zv) throw Error("X, Y and Z must be distinct variables");
  std::size_t total = 1;
  for (auto a : arities) total *= a;
  if (mass.size() != total) throw Error("joint mass size does not match variable arities");

  std::vector<double> out(arities[xv] * arities[yv] * arities[zv], 0.0);
  std::vector<std::size_t> digit(nv, 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t c = cell;
    for (std::size_t v = nv; v-- > 0;) {
      digit[v] = c % arities[v];
      c /= arities[v];
    }
    out[(digit[xv] * arities[yv] + digit[yv]) * arities[zv] + digit[zv]] += mass[cell];
  }
  return TripleJoint(arities[xv], arities[yv], arities[zv], std::move(out));
}

// Variables of a JointTable are its features followed by the label.
inline TripleJoint marginalize_to_triple(const JointTable& joint, std::size_t xv, std::size_t yv, std::size_t zv) {
  std::vector<std::size_t> arities;
  for (const auto& f : joint.schema()) arities.push_back(f.arity());
  arities.push_back(joint.label_space().size());
  return marginalize_to_triple(arities, joint.masses(), xv, yv, zv);
}

namespace weather {
inline constexpr double kLightning = 0.1;
inline constexpr double kThunderGivenLightning = 0.9;
inline constexpr double kThunderGivenNoLightning = 0.05;
inline constexpr double kRainGivenLightning = 0.7;
inline constexpr double kRainGivenNoLightning = 0.2;
}  // namespace weather

// Boolean (Thunder, Rain, Lightning) joint built as P(L) P(T|L) P(R|L), so
// Thunder and Rain are independent given Lightning but not marginally.
// Index 1 means "true".
inline TripleJoint weather_example() {
  using namespace weather;
  const double pl[2] = {1.0 - kLightning, kLightning};
  const double pt1[2] = {kThunderGivenNoLightning, kThunderGivenLightning};
  const double pr1[2] = {kRainGivenNoLightning, kRainGivenLightning};
  std::vector<double> m(8);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t l = 0; l < 2; ++l) {
        double ptl = t ? pt1[l] : 1.0 - pt1[l];
        double prl = r ? pr1[l] : 1.0 - pr1[l];
        m[(t * 2 + r) * 2 + l] = pl[l] * ptl * prl;
      }
  return TripleJoint(2, 2, 2, std::move(m));
}

}  // namespace nbayes
