#include "canard/model.hpp"

#include <cmath>

namespace canard {

void params::validate() const {
    if (!(A > 0.0) || !std::isfinite(A))
        throw std::invalid_argument("params: A must be positive and finite");
    if (!(B > 0.0) || !std::isfinite(B))
        throw std::invalid_argument("params: B must be positive and finite");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("params: eps must be positive and finite");
}

kinetics_rates kinetics(const params& pars, double u, double v) {
    const double uuv = u * u * v;
    return {pars.A - (pars.B + 1.0) * u + uuv, pars.B * u - uuv};
}

phase_point equilibrium(const params& pars) {
    return {pars.A, 0.0, pars.B / pars.A, 0.0};
}

phase_point vector_field(const params& pars, const phase_point& y, time_scale scale) {
    const kinetics_rates r = kinetics(pars, y.u, y.v);
    phase_point dy{y.p, -r.f, pars.eps * y.q, pars.eps * (-r.g)};
    if (scale == time_scale::slow) {
        dy.u /= pars.eps;
        dy.p /= pars.eps;
        dy.v /= pars.eps;
        dy.q /= pars.eps;
    }
    return dy;
}

phase_point reverse(const phase_point& y) { return {y.u, -y.p, y.v, -y.q}; }

translated_point translate(const params& pars, const phase_point& y) {
    return {y.u - pars.A, y.p, y.v - 1.0 / pars.A, y.q};
}

phase_point untranslate(const params& pars, const translated_point& t) {
    return {t.U + pars.A, t.P, t.V + 1.0 / pars.A, t.Q};
}

double coupling_term(const params& pars, double U, double V) {
    return -pars.calB() * U + 2.0 * pars.A * U * V + U * U * V;
}

translated_point translated_field(const params& pars, const translated_point& t) {
    const double A = pars.A;
    const double F = coupling_term(pars, t.U, t.V);
    const double core = A * pars.calB() - A * A * t.V - t.U * t.U / A - F;
    return {t.P, core, pars.eps * t.Q, pars.eps * (t.U - core)};
}

} // namespace canard
