#pragma once

#include "renorm/extension.hpp"
#include "renorm/observable.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace renorm {

/// gamma_{(x,s)}((u, 0)); forms of this kind vanish on fiber directions.
using OneForm = std::function<double(const Vec2& x, double s, const Vec2& u)>;
using VectorWindow = std::function<Vec2(double)>;

/// pi^* dg.
OneForm lift_differential(const Observable& g);

/// [L-hat gamma]_{q}((u, 0)): weighted pull-back through the extended inverse.
double one_form_transfer(const ExtMapSpec& e, const VectorField& vf, const OneForm& gamma,
                         const ExtPoint& q, const Vec2& u);
/// L-hat^n gamma as a form; the |V| ratios telescope along the backward orbit.
OneForm one_form_transfer_power(const ExtMapSpec& e, const VectorField& vf, OneForm gamma, int n);

/// int_{s0}^{s1} gamma_{(phi_s x, V-hat)}((D_x phi_s w(s), 0)) ds; w is taken as zero outside.
double h1_functional(const VectorField& vf, const OneForm& gamma, const Vec2& x,
                     const VectorWindow& w, double s0, double s1, double tol = 1e-10);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const;  ///< |lhs - rhs| / max(1, |lhs|)
};

/**
 * @brief Window transfer of H^1 through n iterates.
 *
 * lhs uses the window [Theta_{x,n}^{-1} w] o tau_n(x, .) at x with gamma;
 * rhs uses w at F^n x with L-hat^n gamma. w lives on [0, 1] in the renormalized time.
 */
IdentityCheck h1_window_transfer(const ExtMapSpec& e, const VectorField& vf, const OneForm& gamma,
                                 const Vec2& x, int n, const VectorWindow& w, double tol = 1e-10);

/// <v, grad H_{x,t}(g)> against H^1 at F^n x of L-hat^n pi^* dg with window Theta_{x,n} v.
IdentityCheck gradient_transfer(const ExtMapSpec& e, const VectorField& vf, const Observable& g,
                                const Vec2& x, const Vec2& v, double t, int n, double tol = 1e-10);

/// Curve in Omega's base parametrized on [0, 1].
struct Leaf {
  std::function<Vec2(double)> omega;
  std::function<Vec2(double)> velocity;
  double length() const;
};

/// Constant-speed segment from x0 in direction (1, slope).
Leaf straight_leaf(const Vec2& x0, double slope, double length);

/// Throws LeafInvalid unless the tangent slope stays in the bracket and the length is in [delta/2, delta].
void validate_leaf(const Leaf& W, const SlopeBracket& bracket, double delta);

/// int_0^1 phi(s) g(omega(s), slope of omega'(s)) |omega'(s)| ds.
double leaf_pairing(const Leaf& W, const std::function<double(double)>& phi, const ExtFunction& g,
                    double tol = 1e-12);

struct LeafFamily {
  std::vector<Leaf> leaves;
  double delta = 0.5;
};

/// Random straight leaves with slopes in the bracket and lengths in [delta/2, delta].
LeafFamily random_stable_leaves(const SlopeBracket& bracket, int count = 64, double delta = 0.5,
                                std::uint64_t seed = 1);

/**
 * @brief Finite surrogate of the p = 0 anisotropic seminorm.
 *
 * sup over leaves and phi_j(s) = sin(j pi s), j = 1..4, of
 * |int_W phi_j g| / |phi_j|_{C^q}, with |phi|_{C^q} = sum_{i <= q} sup |phi^{(i)}|.
 */
double sampled_seminorm(const ExtFunction& g, const LeafFamily& family, int q, double tol = 1e-10);

}  // namespace renorm
