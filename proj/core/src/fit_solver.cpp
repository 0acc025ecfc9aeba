#include "etuq/error.hpp"
#include "etuq/fit.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace etuq {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Direct solver whose factorization is kept across calls and refreshed only
// when stationary refinement with the stale factor stops contracting.
class LaggedSolver {
public:
    void reset() { factored_ = false; }
    [[nodiscard]] std::size_t factorizations() const { return count_; }

    // Solves a x = b to ||a x - b|| <= tol ||b||; x holds the starting guess
    // when `warm` is set.
    void solve(const SpMat& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, bool warm,
               const char* what) {
        const double bn = b.norm();
        if (bn == 0.0) {
            x.setZero(b.size());
            return;
        }
        if (!analyzed_) {
            ldlt_.analyzePattern(a);
            analyzed_ = true;
        }
        bool fresh = false;
        if (!factored_) {
            factorize(a, what);
            fresh = true;
        }
        if (!warm || x.size() != b.size()) x = ldlt_.solve(b);
        double last = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 60; ++it) {
            const Eigen::VectorXd r = b - a * x;
            const double rn = r.norm();
            if (!std::isfinite(rn)) break;
            if (rn <= tol * bn) return;
            if (rn > 0.05 * last && !fresh) {
                factorize(a, what);
                fresh = true;
                x = ldlt_.solve(b);
                last = std::numeric_limits<double>::infinity();
                continue;
            }
            if (rn > 0.9 * last && fresh && it > 8) break;
            last = rn;
            x += ldlt_.solve(r);
        }
        const double rn = (b - a * x).norm();
        if (rn <= tol * bn) return;
        throw NumericalError(std::string(what) + ": linear solve stalled at relative residual " +
                             std::to_string(rn / bn));
    }

private:
    void factorize(const SpMat& a, const char* what) {
        ldlt_.factorize(a);
        ++count_;
        if (ldlt_.info() != Eigen::Success) {
            factored_ = false;
            throw NumericalError(std::string(what) + ": factorization failed");
        }
        factored_ = true;
    }

    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    bool analyzed_ = false;
    bool factored_ = false;
    std::size_t count_ = 0;
};

struct Stamp {
    Eigen::Index aa, bb, ab, ba;
};

Eigen::Index value_position(const SpMat& m, Eigen::Index row, Eigen::Index col) {
    const auto* outer = m.outerIndexPtr();
    const auto* inner = m.innerIndexPtr();
    const auto* first = inner + outer[col];
    const auto* last = inner + outer[col + 1];
    const auto* it = std::lower_bound(first, last, static_cast<int>(row));
    if (it == last || *it != row) throw NumericalError("sparsity pattern lookup failed");
    return it - inner;
}

void check_material(const Material& m, double lo, double hi) {
    auto positive_law = [&](double ref, double alpha) {
        return ref > 0.0 && 1.0 + alpha * (lo - m.t_ref) > 0.0 && 1.0 + alpha * (hi - m.t_ref) > 0.0;
    };
    if (!positive_law(m.sigma_ref, m.alpha_sigma))
        throw ConfigError("material '" + m.name + "': sigma not positive over the temperature range");
    if (!positive_law(m.lambda_ref, m.alpha_lambda))
        throw ConfigError("material '" + m.name + "': lambda not positive over the temperature range");
    if (!(m.rho_c > 0.0)) throw ConfigError("material '" + m.name + "': rho_c must be positive");
}

} // namespace

void ETModel::validate() const {
    const std::size_t n = grid.node_count();
    if (materials.empty()) throw ConfigError("model: no materials");
    if (cell_material.size() != grid.cell_count()) throw ConfigError("model: cell material count mismatch");
    for (auto m : cell_material)
        if (m >= materials.size()) throw ConfigError("model: cell material id out of range");
    const double lo = config.ambient;
    const double hi = config.ambient + 600.0;
    for (const auto& m : materials) check_material(m, lo, hi);
    for (const auto& w : wires) {
        if (w.node_a >= n || w.node_b >= n) throw ConfigError("model: wire node out of range");
        if (w.node_a == w.node_b) throw ConfigError("model: wire endpoints coincide");
        if (!(w.area > 0.0) || !(w.min_length > 0.0)) throw ConfigError("model: wire area and length must be positive");
        if (w.material >= materials.size()) throw ConfigError("model: wire material id out of range");
    }
    std::vector<int> owner(n, -1);
    for (std::size_t g = 0; g < pads.size(); ++g) {
        if (pads[g].nodes.empty()) throw ConfigError("model: pad '" + pads[g].name + "' has no nodes");
        if (!std::isfinite(pads[g].voltage)) throw ConfigError("model: pad voltage not finite");
        for (auto node : pads[g].nodes) {
            if (node >= n) throw ConfigError("model: pad node out of range");
            if (owner[node] >= 0 && pads[static_cast<std::size_t>(owner[node])].voltage != pads[g].voltage)
                throw ConfigError("model: node assigned to pads with different voltages");
            owner[node] = static_cast<int>(g);
        }
    }
    const auto& c = config;
    if (c.steps < 1) throw ConfigError("config: steps must be >= 1");
    if (!(c.end_time > 0.0)) throw ConfigError("config: end_time must be positive");
    if (!(c.newton_tolerance > 0.0) || !(c.coupling_tolerance > 0.0) || !(c.electric_tolerance > 0.0))
        throw ConfigError("config: tolerances must be positive");
    if (c.newton_max_iterations < 1 || c.coupling_max_iterations < 1)
        throw ConfigError("config: iteration caps must be >= 1");
    if (c.emissivity < 0.0 || c.emissivity > 1.0) throw ConfigError("config: emissivity must lie in [0, 1]");
    if (c.heat_transfer < 0.0) throw ConfigError("config: heat transfer coefficient must be >= 0");
    if (!(c.ambient > 0.0)) throw ConfigError("config: ambient temperature must be positive");
    if (!(elongation_support.lower >= 0.0 && elongation_support.lower < elongation_support.upper &&
          elongation_support.upper < 1.0))
        throw ConfigError("model: elongation support must satisfy 0 <= a < b < 1");
}

double total_wire_length(double min_length, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("relative elongation must lie in [0, 1)");
    return min_length / (1.0 - delta);
}

WireConductance bondwire_conductances(const Bondwire& wire, const Material& material, double delta,
                                      double wire_temperature) {
    const double length = total_wire_length(wire.min_length, delta);
    return {material.sigma(wire_temperature) * wire.area / length,
            material.lambda(wire_temperature) * wire.area / length};
}

struct ElectroThermalSolver::Workspace {
    std::size_t n = 0;
    // per edge: contributions [offset[e], offset[e+1]) of (material, area / length)
    std::vector<std::size_t> offset;
    std::vector<std::size_t> material;
    std::vector<double> coefficient;
    Eigen::VectorXd capacity;
    SpMat pattern;
    std::vector<Stamp> edge_stamps;
    std::vector<Stamp> wire_stamps;
    std::vector<Eigen::Index> diagonal;
    std::vector<char> dirichlet;
    Eigen::VectorXd dirichlet_value;
    bool grounded = false;
    LaggedSolver electric;
    LaggedSolver thermal;
    SpMat scratch;
};

ElectroThermalSolver::ElectroThermalSolver(std::shared_ptr<const ETModel> model)
    : model_(std::move(model)), work_(std::make_unique<Workspace>()) {
    if (!model_) throw ConfigError("ElectroThermalSolver: null model");
    model_->validate();
    const auto& grid = model_->grid;
    auto& w = *work_;
    w.n = grid.node_count();
    const auto& edges = grid.edges();

    w.offset.reserve(edges.size() + 1);
    w.offset.push_back(0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto shares = grid.facet_shares(e);
        const std::size_t start = w.material.size();
        for (const auto& s : shares) {
            const std::size_t m = model_->cell_material[s.cell];
            const double c = s.area / edges[e].length;
            bool merged = false;
            for (std::size_t k = start; k < w.material.size(); ++k)
                if (w.material[k] == m) {
                    w.coefficient[k] += c;
                    merged = true;
                }
            if (!merged) {
                w.material.push_back(m);
                w.coefficient.push_back(c);
            }
        }
        w.offset.push_back(w.material.size());
    }

    w.capacity = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.n));
    const double eighth = grid.cell_volume() / 8.0;
    const auto [nx, ny, nz] = grid.nodes();
    for (std::size_t iz = 0; iz + 1 < nz; ++iz)
        for (std::size_t iy = 0; iy + 1 < ny; ++iy)
            for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
                const double c = model_->materials[model_->cell_material[grid.cell(ix, iy, iz)]].rho_c * eighth;
                for (std::size_t k = 0; k < 8; ++k)
                    w.capacity[static_cast<Eigen::Index>(grid.node(ix + (k & 1), iy + ((k >> 1) & 1), iz + (k >> 2)))] += c;
            }

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(w.n + 4 * (edges.size() + model_->wires.size()));
    for (std::size_t i = 0; i < w.n; ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.0);
    auto couple = [&](std::size_t a, std::size_t b) {
        t.emplace_back(static_cast<int>(a), static_cast<int>(b), 0.0);
        t.emplace_back(static_cast<int>(b), static_cast<int>(a), 0.0);
    };
    for (const auto& e : edges) couple(e.a, e.b);
    for (const auto& wire : model_->wires) couple(wire.node_a, wire.node_b);
    w.pattern.resize(static_cast<Eigen::Index>(w.n), static_cast<Eigen::Index>(w.n));
    w.pattern.setFromTriplets(t.begin(), t.end());
    w.pattern.makeCompressed();

    auto stamp = [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        return Stamp{value_position(w.pattern, ia, ia), value_position(w.pattern, ib, ib),
                     value_position(w.pattern, ia, ib), value_position(w.pattern, ib, ia)};
    };
    for (const auto& e : edges) w.edge_stamps.push_back(stamp(e.a, e.b));
    for (const auto& wire : model_->wires) w.wire_stamps.push_back(stamp(wire.node_a, wire.node_b));
    for (std::size_t i = 0; i < w.n; ++i)
        w.diagonal.push_back(value_position(w.pattern, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));

    w.dirichlet.assign(w.n, 0);
    w.dirichlet_value = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.n));
    for (const auto& pad : model_->pads)
        for (auto node : pad.nodes) {
            w.dirichlet[node] = 1;
            w.dirichlet_value[static_cast<Eigen::Index>(node)] = pad.voltage;
        }
    w.grounded = std::find(w.dirichlet.begin(), w.dirichlet.end(), 1) != w.dirichlet.end();
    w.scratch = w.pattern;
}

ElectroThermalSolver::~ElectroThermalSolver() = default;
ElectroThermalSolver::ElectroThermalSolver(ElectroThermalSolver&&) noexcept = default;
ElectroThermalSolver& ElectroThermalSolver::operator=(ElectroThermalSolver&&) noexcept = default;

const Eigen::VectorXd& ElectroThermalSolver::capacity() const noexcept { return work_->capacity; }

namespace {

void check_inputs(std::span<const double> delta, const Eigen::VectorXd& temperature, std::size_t wires,
                  std::size_t nodes) {
    if (delta.size() != wires) throw DomainError("delta size must equal the wire count");
    for (double d : delta)
        if (!(d >= 0.0 && d < 1.0)) throw DomainError("relative elongation must lie in [0, 1)");
    if (static_cast<std::size_t>(temperature.size()) != nodes) throw DomainError("temperature size mismatch");
    if (!temperature.allFinite()) throw DomainError("temperature must be finite");
}

template <class Law>
void assemble_laplacian(const ETModel& model, const std::vector<std::size_t>& offset,
                        const std::vector<std::size_t>& material, const std::vector<double>& coefficient,
                        const std::vector<Stamp>& edge_stamps, const Eigen::VectorXd& t, double* values, Law law) {
    const auto& edges = model.grid.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double te = 0.5 * (t[static_cast<Eigen::Index>(edges[e].a)] + t[static_cast<Eigen::Index>(edges[e].b)]);
        double g = 0.0;
        for (std::size_t k = offset[e]; k < offset[e + 1]; ++k)
            g += coefficient[k] * law(model.materials[material[k]], te);
        const Stamp& s = edge_stamps[e];
        values[s.aa] += g;
        values[s.bb] += g;
        values[s.ab] -= g;
        values[s.ba] -= g;
    }
}

double wire_temperature(const Bondwire& wire, const Eigen::VectorXd& t) {
    return 0.5 * (t[static_cast<Eigen::Index>(wire.node_a)] + t[static_cast<Eigen::Index>(wire.node_b)]);
}

} // namespace

ElectricSystem ElectroThermalSolver::assemble_electric(std::span<const double> delta,
                                                       const Eigen::VectorXd& temperature) {
    ElectricSystem sys;
    assemble_electric_into(delta, temperature, sys, true);
    return sys;
}

void ElectroThermalSolver::assemble_electric_into(std::span<const double> delta, const Eigen::VectorXd& temperature,
                                                  ElectricSystem& sys, bool keep_conductance) {
    const auto& m = *model_;
    auto& w = *work_;
    check_inputs(delta, temperature, m.wires.size(), w.n);
    if (!w.grounded) throw NumericalError("electric system singular: no Dirichlet nodes (floating potential)");

    if (sys.matrix.nonZeros() != w.pattern.nonZeros() || sys.matrix.rows() != w.pattern.rows()) sys.matrix = w.pattern;
    double* v = sys.matrix.valuePtr();
    std::fill(v, v + sys.matrix.nonZeros(), 0.0);
    assemble_laplacian(m, w.offset, w.material, w.coefficient, w.edge_stamps, temperature, v,
                       [](const Material& mat, double t) { return mat.sigma(t); });
    for (std::size_t j = 0; j < m.wires.size(); ++j) {
        const auto& wire = m.wires[j];
        const double g = bondwire_conductances(wire, m.materials[wire.material], delta[j],
                                               wire_temperature(wire, temperature)).electric;
        const Stamp& s = w.wire_stamps[j];
        v[s.aa] += g;
        v[s.bb] += g;
        v[s.ab] -= g;
        v[s.ba] -= g;
    }
    if (keep_conductance) sys.conductance = sys.matrix;

    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.n));
    const auto* outer = sys.matrix.outerIndexPtr();
    const auto* inner = sys.matrix.innerIndexPtr();
    for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(w.n); ++col) {
        const bool dc = w.dirichlet[static_cast<std::size_t>(col)] != 0;
        for (auto k = outer[col]; k < outer[col + 1]; ++k) {
            const auto row = inner[k];
            const bool dr = w.dirichlet[static_cast<std::size_t>(row)] != 0;
            if (!dc && !dr) continue;
            if (row == col) {
                v[k] = 1.0;
                continue;
            }
            if (dc && !dr) sys.rhs[row] -= v[k] * w.dirichlet_value[col];
            v[k] = 0.0;
        }
    }
    for (std::size_t i = 0; i < w.n; ++i)
        if (w.dirichlet[i]) sys.rhs[static_cast<Eigen::Index>(i)] = w.dirichlet_value[static_cast<Eigen::Index>(i)];
    if (keep_conductance) sys.is_dirichlet.assign(w.dirichlet.begin(), w.dirichlet.end());
}

Eigen::VectorXd ElectroThermalSolver::solve_electric(const ElectricSystem& system) {
    Eigen::VectorXd x;
    work_->electric.solve(system.matrix, system.rhs, x, model_->config.electric_tolerance, false, "electric solve");
    return x;
}

Eigen::VectorXd ElectroThermalSolver::heat_sources(std::span<const double> delta, const Eigen::VectorXd& potential,
                                                   const Eigen::VectorXd& temperature) const {
    const auto& m = *model_;
    const auto& w = *work_;
    check_inputs(delta, temperature, m.wires.size(), w.n);
    if (static_cast<std::size_t>(potential.size()) != w.n) throw DomainError("potential size mismatch");
    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.n));
    const auto& edges = m.grid.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto a = static_cast<Eigen::Index>(edges[e].a);
        const auto b = static_cast<Eigen::Index>(edges[e].b);
        const double te = 0.5 * (temperature[a] + temperature[b]);
        double g = 0.0;
        for (std::size_t k = w.offset[e]; k < w.offset[e + 1]; ++k)
            g += w.coefficient[k] * m.materials[w.material[k]].sigma(te);
        const double du = potential[a] - potential[b];
        const double p = 0.5 * g * du * du;
        q[a] += p;
        q[b] += p;
    }
    for (std::size_t j = 0; j < m.wires.size(); ++j) {
        const auto& wire = m.wires[j];
        const auto a = static_cast<Eigen::Index>(wire.node_a);
        const auto b = static_cast<Eigen::Index>(wire.node_b);
        const double g = bondwire_conductances(wire, m.materials[wire.material], delta[j],
                                               wire_temperature(wire, temperature)).electric;
        const double du = potential[a] - potential[b];
        const double p = 0.5 * g * du * du;
        q[a] += p;
        q[b] += p;
    }
    return q;
}

Eigen::VectorXd ElectroThermalSolver::boundary_outflow(const Eigen::VectorXd& temperature) const {
    const auto& c = model_->config;
    const auto& area = model_->grid.boundary_area();
    const double t4 = std::pow(c.ambient, 4);
    Eigen::VectorXd out(temperature.size());
    for (Eigen::Index i = 0; i < temperature.size(); ++i) {
        const double t = temperature[i];
        out[i] = area[static_cast<std::size_t>(i)] *
                 (c.heat_transfer * (t - c.ambient) + c.emissivity * c.stefan_boltzmann * (t * t * t * t - t4));
    }
    return out;
}

Eigen::VectorXd ElectroThermalSolver::thermal_residual(std::span<const double> delta, const Eigen::VectorXd& previous,
                                                       const Eigen::VectorXd& sources, double dt,
                                                       const Eigen::VectorXd& temperature) const {
    const auto& m = *model_;
    const auto& w = *work_;
    check_inputs(delta, temperature, m.wires.size(), w.n);
    Eigen::VectorXd r = w.capacity.cwiseProduct(temperature - previous) / dt + boundary_outflow(temperature) - sources;
    const auto& edges = m.grid.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto a = static_cast<Eigen::Index>(edges[e].a);
        const auto b = static_cast<Eigen::Index>(edges[e].b);
        const double te = 0.5 * (temperature[a] + temperature[b]);
        double g = 0.0;
        for (std::size_t k = w.offset[e]; k < w.offset[e + 1]; ++k)
            g += w.coefficient[k] * m.materials[w.material[k]].lambda(te);
        const double flux = g * (temperature[a] - temperature[b]);
        r[a] += flux;
        r[b] -= flux;
    }
    for (std::size_t j = 0; j < m.wires.size(); ++j) {
        const auto& wire = m.wires[j];
        const auto a = static_cast<Eigen::Index>(wire.node_a);
        const auto b = static_cast<Eigen::Index>(wire.node_b);
        const double g = bondwire_conductances(wire, m.materials[wire.material], delta[j],
                                               wire_temperature(wire, temperature)).thermal;
        const double flux = g * (temperature[a] - temperature[b]);
        r[a] += flux;
        r[b] -= flux;
    }
    return r;
}

double ElectroThermalSolver::thermal_scale(const Eigen::VectorXd& previous, const Eigen::VectorXd& sources,
                                           double dt, const Eigen::VectorXd& t) const {
    return work_->capacity.cwiseProduct(t - previous).norm() / dt + sources.norm() + boundary_outflow(t).norm();
}

bool ElectroThermalSolver::thermal_converged(const NewtonState& s, const Eigen::VectorXd& previous,
                                             const Eigen::VectorXd& sources, double dt) const {
    const double floor = 1e-15 * work_->capacity.cwiseProduct(s.t).norm() / dt;
    return s.norm <= model_->config.newton_tolerance * thermal_scale(previous, sources, dt, s.t) || s.norm <= floor;
}

bool ElectroThermalSolver::newton_update(std::span<const double> delta, const Eigen::VectorXd& previous,
                                         const Eigen::VectorXd& sources, double dt, NewtonState& s) {
    const auto& m = *model_;
    auto& w = *work_;
    const auto& c = m.config;
    const auto& area = m.grid.boundary_area();

    // Jacobian with frozen conductivities; capacity, convection and radiation exact.
    double* v = w.scratch.valuePtr();
    std::fill(v, v + w.scratch.nonZeros(), 0.0);
    assemble_laplacian(m, w.offset, w.material, w.coefficient, w.edge_stamps, s.t, v,
                       [](const Material& mat, double temp) { return mat.lambda(temp); });
    for (std::size_t j = 0; j < m.wires.size(); ++j) {
        const auto& wire = m.wires[j];
        const double g = bondwire_conductances(wire, m.materials[wire.material], delta[j],
                                               wire_temperature(wire, s.t)).thermal;
        const Stamp& st = w.wire_stamps[j];
        v[st.aa] += g;
        v[st.bb] += g;
        v[st.ab] -= g;
        v[st.ba] -= g;
    }
    for (std::size_t i = 0; i < w.n; ++i) {
        const double ti = s.t[static_cast<Eigen::Index>(i)];
        v[w.diagonal[i]] += w.capacity[static_cast<Eigen::Index>(i)] / dt +
                            area[i] * (c.heat_transfer + 4.0 * c.emissivity * c.stefan_boltzmann * ti * ti * ti);
    }
    Eigen::VectorXd dx;
    w.thermal.solve(w.scratch, -s.residual, dx, 1e-3, false, "thermal solve");

    double step = 1.0;
    for (int k = 0; k < 12; ++k) {
        Eigen::VectorXd trial = s.t + step * dx;
        if ((trial.array() > 0.0).all()) {
            Eigen::VectorXd rt = thermal_residual(delta, previous, sources, dt, trial);
            const double rtn = rt.norm();
            if (rtn < (1.0 - 1e-4 * step) * s.norm) {
                s.t = std::move(trial);
                s.residual = std::move(rt);
                s.norm = rtn;
                return true;
            }
        }
        step *= 0.5;
    }
    return false;
}

Eigen::VectorXd ElectroThermalSolver::thermal_step(std::span<const double> delta, const Eigen::VectorXd& previous,
                                                   const Eigen::VectorXd& sources, double dt,
                                                   const Eigen::VectorXd* guess) {
    if (!(dt > 0.0)) throw DomainError("thermal_step: dt must be positive");
    const auto& m = *model_;
    check_inputs(delta, previous, m.wires.size(), work_->n);
    if (static_cast<std::size_t>(sources.size()) != work_->n) throw DomainError("sources size mismatch");

    NewtonState s;
    s.t = guess ? *guess : previous;
    if (static_cast<std::size_t>(s.t.size()) != work_->n) throw DomainError("guess size mismatch");
    s.residual = thermal_residual(delta, previous, sources, dt, s.t);
    s.norm = s.residual.norm();
    for (int it = 0; it < m.config.newton_max_iterations; ++it) {
        if (thermal_converged(s, previous, sources, dt)) return s.t;
        if (!newton_update(delta, previous, sources, dt, s)) break;
    }
    if (thermal_converged(s, previous, sources, dt)) return s.t;
    throw NumericalError("thermal Newton did not converge; last residual " + std::to_string(s.norm) + " (relative " +
                         std::to_string(s.norm / std::max(thermal_scale(previous, sources, dt, s.t), 1e-300)) + ")");
}

std::vector<double> ElectroThermalSolver::wire_temperatures(const Eigen::VectorXd& temperature) const {
    std::vector<double> out;
    out.reserve(model_->wires.size());
    for (const auto& wire : model_->wires) out.push_back(wire_temperature(wire, temperature));
    return out;
}

TransientResult ElectroThermalSolver::run_transient(std::span<const double> delta) {
    const auto& m = *model_;
    auto& w = *work_;
    const auto& c = m.config;
    const Eigen::VectorXd ambient = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(w.n), c.ambient);
    check_inputs(delta, ambient, m.wires.size(), w.n);

    // Start from a clean factorization state so the result depends on delta only.
    w.electric.reset();
    w.thermal.reset();
    const std::size_t factorizations0 = w.electric.factorizations() + w.thermal.factorizations();

    TransientResult res;
    for (double d : delta)
        if (!m.elongation_support.contains(d)) res.outside_support = true;

    const double dt = c.end_time / c.steps;
    Eigen::VectorXd t = ambient;
    Eigen::VectorXd phi;
    res.trace.times.push_back(0.0);
    res.trace.wire_temperatures.push_back(wire_temperatures(t));

    // Staggered coupling: each pass solves the electric problem at the current
    // iterate and takes one Newton update of the thermal step. A step is done
    // when the wire temperatures settle and the thermal residual is converged.
    Eigen::VectorXd before = t;
    ElectricSystem sys;
    for (int step = 1; step <= c.steps; ++step) {
        NewtonState s;
        s.t = 2.0 * t - before;
        std::vector<double> wt = wire_temperatures(s.t);
        bool converged = false;
        int it = 0;
        int newton = 0;
        while (it < c.coupling_max_iterations) {
            ++it;
            assemble_electric_into(delta, s.t, sys, false);
            w.electric.solve(sys.matrix, sys.rhs, phi, c.electric_tolerance, phi.size() > 0, "electric solve");
            const Eigen::VectorXd q = heat_sources(delta, phi, s.t);
            s.residual = thermal_residual(delta, t, q, dt, s.t);
            s.norm = s.residual.norm();
            if (thermal_converged(s, t, q, dt)) {
                converged = true;
                break;
            }
            if (!newton_update(delta, t, q, dt, s) || ++newton > c.newton_max_iterations * c.coupling_max_iterations)
                throw NumericalError("thermal Newton stalled in step " + std::to_string(step) + "; residual " +
                                     std::to_string(s.norm));
            const std::vector<double> nwt = wire_temperatures(s.t);
            double change = 0.0;
            for (std::size_t j = 0; j < wt.size(); ++j) change = std::max(change, std::abs(nwt[j] - wt[j]));
            wt = nwt;
            if (change <= c.coupling_tolerance && thermal_converged(s, t, q, dt)) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericalError("electrothermal coupling did not converge in step " + std::to_string(step));
        res.max_coupling_iterations = std::max(res.max_coupling_iterations, it);
        before = std::move(t);
        t = std::move(s.t);
        res.trace.times.push_back(dt * step);
        res.trace.wire_temperatures.push_back(wire_temperatures(t));
    }
    res.t_max = extract_qoi(res.trace);
    res.final_temperature = std::move(t);
    res.final_potential = std::move(phi);
    res.factorizations = w.electric.factorizations() + w.thermal.factorizations() - factorizations0;
    return res;
}

double extract_qoi(const WireTrace& trace) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& row : trace.wire_temperatures)
        for (double v : row) {
            best = std::max(best, v);
            any = true;
        }
    if (!any) throw DomainError("extract_qoi: empty trace");
    return best;
}

} // namespace etuq
