#include "smcva/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace smcva {

void ModelSpec::validate() const {
    if (dim < 4) throw std::invalid_argument("ModelSpec: dim must be >= 4");
    if (!(dt > 0.0)) throw std::invalid_argument("ModelSpec: dt must be > 0");
    if (n_params < 1) throw std::invalid_argument("ModelSpec: n_params must be >= 1");
}

namespace {

inline int wrap(int i, int dim) {
    // mathematical mod, offsets here never exceed one period
    return (i % dim + dim) % dim;
}

void check_dims(const ModelSpec& spec, const Eigen::VectorXd& x,
                const Eigen::VectorXd& p) {
    spec.validate();
    if (x.size() != spec.dim)
        throw std::invalid_argument("state dimension does not match spec");
    if (p.size() != spec.n_params)
        throw std::invalid_argument("parameter dimension does not match spec");
}

}  // namespace

void l96_field(int dim, const double* x, double forcing, double* out) {
    for (int i = 0; i < dim; ++i) {
        const double xp1 = x[wrap(i + 1, dim)];
        const double xm1 = x[wrap(i - 1, dim)];
        const double xm2 = x[wrap(i - 2, dim)];
        out[i] = (xp1 - xm2) * xm1 - x[i] + forcing;
    }
}

void l96_jac_tv(int dim, const double* x, const double* v, double* out) {
    for (int i = 0; i < dim; ++i) {
        const double vi = v[i];
        const double xm1 = x[wrap(i - 1, dim)];
        out[wrap(i + 1, dim)] += xm1 * vi;
        out[wrap(i - 2, dim)] -= xm1 * vi;
        out[wrap(i - 1, dim)] += (x[wrap(i + 1, dim)] - x[wrap(i - 2, dim)]) * vi;
        out[i] -= vi;
    }
}

void rk4_step(int dim, double dt, const double* x, double forcing,
              double* out, double* work) {
    double* k1 = work;
    double* k2 = work + dim;
    double* k3 = work + 2 * dim;
    double* k4 = work + 3 * dim;
    double* xt = work + 4 * dim;

    l96_field(dim, x, forcing, k1);
    for (int i = 0; i < dim; ++i) xt[i] = x[i] + 0.5 * dt * k1[i];
    l96_field(dim, xt, forcing, k2);
    for (int i = 0; i < dim; ++i) xt[i] = x[i] + 0.5 * dt * k2[i];
    l96_field(dim, xt, forcing, k3);
    for (int i = 0; i < dim; ++i) xt[i] = x[i] + dt * k3[i];
    l96_field(dim, xt, forcing, k4);
    const double w = dt / 6.0;
    for (int i = 0; i < dim; ++i)
        out[i] = x[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void rk4_step_vjp(int dim, double dt, const double* x, double forcing,
                  const double* v, double* adj_x, double* adj_p,
                  double* work) {
    double* x1 = work;
    double* x2 = work + dim;
    double* x3 = work + 2 * dim;
    double* k = work + 3 * dim;
    double* g = work + 4 * dim;
    double* t = work + 5 * dim;

    // forward stage states
    l96_field(dim, x, forcing, k);
    for (int i = 0; i < dim; ++i) x1[i] = x[i] + 0.5 * dt * k[i];
    l96_field(dim, x1, forcing, k);
    for (int i = 0; i < dim; ++i) x2[i] = x[i] + 0.5 * dt * k[i];
    l96_field(dim, x2, forcing, k);
    for (int i = 0; i < dim; ++i) x3[i] = x[i] + dt * k[i];

    const double w = dt / 6.0;
    double psum = 0.0;
    for (int i = 0; i < dim; ++i) adj_x[i] += v[i];

    // g4 = (dt/6) v
    for (int i = 0; i < dim; ++i) g[i] = w * v[i];
    for (int i = 0; i < dim; ++i) psum += g[i];
    for (int i = 0; i < dim; ++i) t[i] = 0.0;
    l96_jac_tv(dim, x3, g, t);
    for (int i = 0; i < dim; ++i) adj_x[i] += t[i];
    // g3 = (2dt/6) v + dt * J(x3)^T g4
    for (int i = 0; i < dim; ++i) g[i] = 2.0 * w * v[i] + dt * t[i];
    for (int i = 0; i < dim; ++i) psum += g[i];
    for (int i = 0; i < dim; ++i) t[i] = 0.0;
    l96_jac_tv(dim, x2, g, t);
    for (int i = 0; i < dim; ++i) adj_x[i] += t[i];
    // g2 = (2dt/6) v + (dt/2) * J(x2)^T g3
    for (int i = 0; i < dim; ++i) g[i] = 2.0 * w * v[i] + 0.5 * dt * t[i];
    for (int i = 0; i < dim; ++i) psum += g[i];
    for (int i = 0; i < dim; ++i) t[i] = 0.0;
    l96_jac_tv(dim, x1, g, t);
    for (int i = 0; i < dim; ++i) adj_x[i] += t[i];
    // g1 = (dt/6) v + (dt/2) * J(x1)^T g2
    for (int i = 0; i < dim; ++i) g[i] = w * v[i] + 0.5 * dt * t[i];
    for (int i = 0; i < dim; ++i) psum += g[i];
    l96_jac_tv(dim, x, g, adj_x);

    // dF/dG is the all-ones column, so each stage contributes sum(g)
    adj_p[0] += psum;
}

Eigen::VectorXd vector_field(const ModelSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p) {
    check_dims(spec, x, p);
    Eigen::VectorXd out(spec.dim);
    l96_field(spec.dim, x.data(), p[0], out.data());
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
jacobians(const ModelSpec& spec, const Eigen::VectorXd& x,
          const Eigen::VectorXd& p) {
    check_dims(spec, x, p);
    const int d = spec.dim;
    Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double xm1 = x[wrap(i - 1, d)];
        jx(i, wrap(i + 1, d)) += xm1;
        jx(i, wrap(i - 2, d)) -= xm1;
        jx(i, wrap(i - 1, d)) += x[wrap(i + 1, d)] - x[wrap(i - 2, d)];
        jx(i, i) -= 1.0;
    }
    Eigen::MatrixXd jp = Eigen::MatrixXd::Ones(d, spec.n_params);
    return {jx, jp};
}

Eigen::VectorXd discrete_map(const ModelSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p) {
    check_dims(spec, x, p);
    Eigen::VectorXd out(spec.dim);
    Eigen::VectorXd work(5 * spec.dim);
    rk4_step(spec.dim, spec.dt, x.data(), p[0], out.data(), work.data());
    if (!out.allFinite())
        throw std::runtime_error("discrete_map: non-finite state produced");
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
jacobians_map(const ModelSpec& spec, const Eigen::VectorXd& x,
              const Eigen::VectorXd& p) {
    check_dims(spec, x, p);
    const int d = spec.dim;
    const double dt = spec.dt;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);

    Eigen::VectorXd k1 = vector_field(spec, x, p);
    Eigen::VectorXd x1 = x + 0.5 * dt * k1;
    Eigen::VectorXd k2 = vector_field(spec, x1, p);
    Eigen::VectorXd x2 = x + 0.5 * dt * k2;
    Eigen::VectorXd k3 = vector_field(spec, x2, p);
    Eigen::VectorXd x3 = x + dt * k3;

    auto [j1, jp1] = jacobians(spec, x, p);
    auto [j2, jp2] = jacobians(spec, x1, p);
    auto [j3, jp3] = jacobians(spec, x2, p);
    auto [j4, jp4] = jacobians(spec, x3, p);

    Eigen::MatrixXd dk1 = j1;
    Eigen::MatrixXd dk2 = j2 * (eye + 0.5 * dt * dk1);
    Eigen::MatrixXd dk3 = j3 * (eye + 0.5 * dt * dk2);
    Eigen::MatrixXd dk4 = j4 * (eye + dt * dk3);
    Eigen::MatrixXd dfdx = eye + (dt / 6.0) * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);

    Eigen::MatrixXd dk1p = jp1;
    Eigen::MatrixXd dk2p = jp2 + 0.5 * dt * j2 * dk1p;
    Eigen::MatrixXd dk3p = jp3 + 0.5 * dt * j3 * dk2p;
    Eigen::MatrixXd dk4p = jp4 + dt * j4 * dk3p;
    Eigen::MatrixXd dfdp = (dt / 6.0) * (dk1p + 2.0 * dk2p + 2.0 * dk3p + dk4p);

    return {dfdx, dfdp};
}

Eigen::MatrixXd integrate_trajectory(const ModelSpec& spec,
                                     const Eigen::VectorXd& x0,
                                     const Eigen::VectorXd& p, int n_steps) {
    check_dims(spec, x0, p);
    if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
    const int d = spec.dim;
    Eigen::MatrixXd traj(n_steps + 1, d);
    Eigen::VectorXd work(5 * d);
    Eigen::VectorXd cur = x0, next(d);
    traj.row(0) = cur;
    for (int k = 1; k <= n_steps; ++k) {
        rk4_step(d, spec.dt, cur.data(), p[0], next.data(), work.data());
        if (!next.allFinite())
            throw std::runtime_error("integrate_trajectory: trajectory diverged");
        traj.row(k) = next;
        cur.swap(next);
    }
    return traj;
}

}  // namespace smcva
