#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "tdrc/mdp.hpp"

namespace tdrc::stability {

struct StackedSystem {
    Mat G;  // 2n x 2n, acting on [h; w]
    Vec g;
};

StackedSystem build_G(const mdp::ExpectationModel& model, double eta, double beta);

std::vector<std::complex<double>> spectrum(const Mat& m);
bool is_hurwitz(const std::vector<std::complex<double>>& eig, double tol = 1e-10);

// Restriction of the model to range(C). Components of w in null(C) never
// affect predictions and are left untouched by every expected update.
struct ReducedModel {
    mdp::ExpectationModel model;
    Mat basis;  // n x r, orthonormal columns spanning range(C)
};
ReducedModel reduce_to_identifiable(const mdp::ExpectationModel& model, double tol = 1e-10);

struct Theorem1Bounds {
    bool A_positive_definite = false;
    double min_eig_H = 0.0;
    // Only meaningful when A is not positive definite; +inf / 0 otherwise.
    double beta_max = 0.0;
    double eta_min = 0.0;
    bool c_singular = false;
    int dimension = 0;  // dimension the bounds were computed in
};

// Computes the bounds on the identifiable subspace when C is singular.
Theorem1Bounds theorem1_bounds(const mdp::ExpectationModel& model);

bool inside_theorem1_region(const Theorem1Bounds& b, double eta, double beta);

struct StabilityReport {
    Theorem1Bounds bounds;
    double eta = 1.0;
    double beta = 1.0;
    std::vector<std::complex<double>> G_spectrum;  // on the identifiable subspace
    bool hurwitz = false;
    double max_real_part = 0.0;
    // Full-space spectrum; contains null-space modes (0 and -eta*beta) when C is singular.
    std::vector<std::complex<double>> G_spectrum_full;
    double fixed_point_residual = 0.0;
    bool td_fixed_point_exists = false;
    int rank_A_beta = 0;
};

StabilityReport analyze(const mdp::ExpectationModel& model, double eta, double beta);

struct SingularCBounds {
    double beta_upper = 0.0;  // min over sampled z with lambda_r < 0 of -b_a / lambda_r
    double eta_lower = 0.0;   // max over sampled z of the implied eta bound at `beta`
    bool beta_admissible = true;  // beta below every sampled beta bound
    long samples = 0;
    int restarts = 0;
    bool binding = false;  // some z had lambda_r < 0
};

// Monte-Carlo estimate over complex unit vectors with local refinement by
// projected gradient ascent; not a certificate.
SingularCBounds singular_c_bounds(const mdp::ExpectationModel& model, double beta, long n_samples = 100000,
                                  int restarts = 100, std::uint64_t seed = 1);

// ||(A + beta I)^T (C + beta I)^{-1} (b - A w)||
double fixed_point_residual(const Vec& w, const mdp::ExpectationModel& model, double beta);

}  // namespace tdrc::stability
