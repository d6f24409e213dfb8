#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "khintype/counting.hpp"
#include "khintype/manifold.hpp"

namespace khintype {

struct KernelReport {
    int H = 0;
    long checked = 0;
    double worst_fejer_slack = 0.0;      // min of F(x) - (2H/pi)^2 [|x| <= 1/(2H)]
    double worst_dirichlet_slack = 0.0;  // min of min(2H+1, 1/(2|x|)) - |D(x)|
    double worst_fejer_x = 0.0;
    double worst_dirichlet_x = 0.0;
    double max_closed_form_error = 0.0;  // |direct sum - closed form|, Fejer kernel

    bool ok(double tol = -1e-9) const { return worst_fejer_slack >= tol && worst_dirichlet_slack >= tol; }
};

/// Checks the Fejer lower bound and the Dirichlet upper bound at every x.
KernelReport kernel_check(int H, std::span<const double> xs);

/// Distance to the nearest integer, rounding half to even.
double dist_to_int(double x);

struct MajorantParams {
    long H = 0;          // floor(1/(4 kappa))
    long r = 0;          // floor(sqrt(delta q kappa))
    double delta = 0.0;
    bool in_regime() const { return H >= 1 && r >= 1; }
};

class OutOfRegime : public std::domain_error {
public:
    explicit OutOfRegime(const MajorantParams& p);
    MajorantParams params;
};

MajorantParams majorant_params(long q, const Rational& kappa, double delta);

/// Midpoint-rule integral over K of prod_i min(1, 1/(r |h . f'(alpha) e_i|)), with one
/// level of 2^d refinement on cells whose max/min ratio exceeds 4.
double product_integral(const ManifoldSpec& spec, std::span<const long> h, long r, int grid);

/// q^d H^-m sum_{|h| <= H} product_integral(h). Throws OutOfRegime unless H, r >= 1.
double majorant(const ManifoldSpec& spec, long q, const Rational& kappa, double delta, int grid, int threads = 0);

struct CompareRow {
    long q = 0;
    Rational kappa;
    int theta_id = 0;
    std::uint64_t A = 0;
    double envelope = 0.0;
    double ratio = 0.0;           // A / envelope
    double majorant = 0.0;
    double majorant_ratio = 0.0;  // A / majorant
    MajorantParams params;
};

struct CompareOptions {
    int k = 2;        // rank used in the envelope's phi
    int threads = 0;
    bool skip_out_of_regime = true;
};

/// Exact counts against the majorant. theta_id numbers the distinct thetas in order of first use.
/// Out-of-regime queries are skipped (or rethrown when skip_out_of_regime is false).
std::vector<CompareRow> compare_sweep(const ManifoldSpec& spec, const std::vector<CountQuery>& queries, double delta,
                                      int grid, const CompareOptions& opts = {});

/// Header q,kappa_num,kappa_den,theta_id,A,envelope,ratio,majorant,majorant_ratio,H,r,delta.
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

}  // namespace khintype
