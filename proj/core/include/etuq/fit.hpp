#pragma once

#include "etuq/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace etuq {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)

/// Temperature-dependent material law:
///   sigma(T)  = sigma_ref  / (1 + alpha_sigma  (T - t_ref))
///   lambda(T) = lambda_ref / (1 + alpha_lambda (T - t_ref))
struct Material {
    std::string name;
    double sigma_ref = 0.0;     // S/m
    double alpha_sigma = 0.0;   // 1/K
    double lambda_ref = 0.0;    // W/(m K)
    double alpha_lambda = 0.0;  // 1/K
    double rho_c = 0.0;         // J/(m^3 K)
    double t_ref = 293.0;       // K

    [[nodiscard]] double sigma(double t) const noexcept { return sigma_ref / (1.0 + alpha_sigma * (t - t_ref)); }
    [[nodiscard]] double lambda(double t) const noexcept { return lambda_ref / (1.0 + alpha_lambda * (t - t_ref)); }
};

enum class Axis { x = 0, y = 1, z = 2 };

/// Primal edge between two nodes; `length` is the primal edge length.
struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    Axis axis = Axis::x;
    double length = 0.0;
};

/// Uniformly spaced Cartesian primal grid with the dual quantities the
/// finite integration technique needs. Node (ix, iy, iz) has id
/// ix + nx (iy + ny iz); cells are numbered the same way on (nx-1, ny-1, nz-1).
class CartesianGrid {
public:
    CartesianGrid(std::array<std::size_t, 3> nodes, std::array<double, 3> spacing);

    [[nodiscard]] const std::array<std::size_t, 3>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::array<double, 3>& spacing() const noexcept { return spacing_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_[0] * nodes_[1] * nodes_[2]; }
    [[nodiscard]] std::size_t cell_count() const noexcept;
    [[nodiscard]] std::size_t node(std::size_t ix, std::size_t iy, std::size_t iz) const;
    [[nodiscard]] std::array<std::size_t, 3> node_coordinates(std::size_t id) const;
    [[nodiscard]] std::size_t cell(std::size_t ix, std::size_t iy, std::size_t iz) const;
    [[nodiscard]] double cell_volume() const noexcept { return spacing_[0] * spacing_[1] * spacing_[2]; }

    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Signed edge-node incidence matrix G (edges x nodes): -1 at a, +1 at b.
    [[nodiscard]] Eigen::SparseMatrix<double> incidence() const;

    /// Cells touching edge e with the share of the dual facet area each
    /// contributes (a quarter of the facet for interior edges).
    struct FacetShare {
        std::size_t cell;
        double area;
    };
    [[nodiscard]] std::vector<FacetShare> facet_shares(std::size_t edge) const;

    /// Cells touching node n (up to eight); each owns 1/8 of its volume.
    [[nodiscard]] std::vector<std::size_t> node_cells(std::size_t node) const;

    /// Boundary (dual) area attached to each node; sums to the box surface.
    [[nodiscard]] const std::vector<double>& boundary_area() const noexcept { return boundary_area_; }
    [[nodiscard]] double surface_area() const noexcept;

private:
    std::array<std::size_t, 3> nodes_;
    std::array<double, 3> spacing_;
    std::vector<Edge> edges_;
    std::vector<double> boundary_area_;
};

/// Lumped electrothermal conductance between two grid nodes.
struct Bondwire {
    std::size_t node_a = 0;
    std::size_t node_b = 0;
    double area = 0.0;        ///< cross-section A_bw, m^2
    double min_length = 0.0;  ///< l_min, m
    std::size_t material = 0;
};

/// Nodes held at a prescribed potential (one contact pad or ground).
struct DirichletGroup {
    std::string name;
    double voltage = 0.0;
    std::vector<std::size_t> nodes;
};

struct ETConfig {
    double ambient = 293.0;             ///< T_inf, K
    double heat_transfer = 25.0;        ///< h, W/(m^2 K)
    double emissivity = 0.5;
    double stefan_boltzmann = kStefanBoltzmann;
    double end_time = 3.5;              ///< s
    int steps = 51;
    double newton_tolerance = 1e-9;     ///< relative thermal residual
    int newton_max_iterations = 30;
    double coupling_tolerance = 1e-8;   ///< K, max wire-temperature change
    int coupling_max_iterations = 50;
    double electric_tolerance = 1e-10;  ///< relative residual bound on electric solves
};

struct ETModel {
    CartesianGrid grid;
    std::vector<Material> materials;
    std::vector<std::size_t> cell_material;  ///< material id per cell
    std::vector<Bondwire> wires;
    std::vector<DirichletGroup> pads;
    ETConfig config;
    Interval elongation_support{0.122, 0.218};

    /// Checks ids, positivity of material data over [T_inf, T_inf + 600 K],
    /// wire endpoints and pads; throws ConfigError.
    void validate() const;
};

/// l_tot = l_min / (1 - delta); throws DomainError unless 0 <= delta < 1.
double total_wire_length(double min_length, double delta);

struct WireConductance {
    double electric = 0.0;  ///< S
    double thermal = 0.0;   ///< W/K
};

WireConductance bondwire_conductances(const Bondwire& wire, const Material& material, double delta,
                                      double wire_temperature);

/// Electric system with Dirichlet nodes eliminated symmetrically: their rows
/// and columns are replaced by identity and their couplings moved to rhs.
struct ElectricSystem {
    Eigen::SparseMatrix<double> conductance;  ///< full nodal matrix before elimination
    Eigen::SparseMatrix<double> matrix;       ///< after elimination
    Eigen::VectorXd rhs;
    std::vector<bool> is_dirichlet;
};

/// Per-step wire temperatures T_bw,j = (T_a + T_b) / 2.
struct WireTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> wire_temperatures;  ///< [step][wire]
};

struct TransientResult {
    double t_max = 0.0;
    WireTrace trace;
    Eigen::VectorXd final_temperature;
    Eigen::VectorXd final_potential;
    int max_coupling_iterations = 0;
    bool outside_support = false;  ///< some delta lay outside the model's support
    std::size_t factorizations = 0;
};

/// Coupled solver for one model. Owns its workspace, so one instance must
/// not be shared between threads; the model itself is read-only.
class ElectroThermalSolver {
public:
    explicit ElectroThermalSolver(std::shared_ptr<const ETModel> model);
    ~ElectroThermalSolver();
    ElectroThermalSolver(ElectroThermalSolver&&) noexcept;
    ElectroThermalSolver& operator=(ElectroThermalSolver&&) noexcept;

    [[nodiscard]] const ETModel& model() const noexcept { return *model_; }

    ElectricSystem assemble_electric(std::span<const double> delta, const Eigen::VectorXd& temperature);

    /// Throws NumericalError on factorization failure or if the relative
    /// residual exceeds the configured bound.
    Eigen::VectorXd solve_electric(const ElectricSystem& system);

    /// Nodal heat sources: bulk Joule heat of each edge split half to each
    /// end node, plus each wire's (Phi_a - Phi_b)^2 G_el split the same way.
    Eigen::VectorXd heat_sources(std::span<const double> delta, const Eigen::VectorXd& potential,
                                 const Eigen::VectorXd& temperature) const;

    /// One implicit Euler step of the nonlinear heat balance, solved by
    /// damped Newton; `guess` seeds the iteration (defaults to previous).
    Eigen::VectorXd thermal_step(std::span<const double> delta, const Eigen::VectorXd& previous,
                                 const Eigen::VectorXd& sources, double dt, const Eigen::VectorXd* guess = nullptr);

    /// Residual of the implicit Euler heat balance at `temperature`.
    Eigen::VectorXd thermal_residual(std::span<const double> delta, const Eigen::VectorXd& previous,
                                     const Eigen::VectorXd& sources, double dt,
                                     const Eigen::VectorXd& temperature) const;

    /// Heat leaving through the boundary per node, W.
    Eigen::VectorXd boundary_outflow(const Eigen::VectorXd& temperature) const;

    /// Nodal heat capacities, J/K.
    [[nodiscard]] const Eigen::VectorXd& capacity() const noexcept;

    /// Full transient from T = T_inf with staggered electric/thermal coupling.
    TransientResult run_transient(std::span<const double> delta);

    [[nodiscard]] std::vector<double> wire_temperatures(const Eigen::VectorXd& temperature) const;

private:
    struct Workspace;
    struct NewtonState {
        Eigen::VectorXd t;
        Eigen::VectorXd residual;
        double norm = 0.0;
    };
    void assemble_electric_into(std::span<const double> delta, const Eigen::VectorXd& temperature,
                                ElectricSystem& system, bool keep_conductance);
    double thermal_scale(const Eigen::VectorXd& previous, const Eigen::VectorXd& sources, double dt,
                         const Eigen::VectorXd& t) const;
    bool thermal_converged(const NewtonState& s, const Eigen::VectorXd& previous, const Eigen::VectorXd& sources,
                           double dt) const;
    // One damped Newton update; false when no step reduces the residual.
    bool newton_update(std::span<const double> delta, const Eigen::VectorXd& previous,
                       const Eigen::VectorXd& sources, double dt, NewtonState& s);

    std::shared_ptr<const ETModel> model_;
    std::unique_ptr<Workspace> work_;
};

/// Maximum over every recorded step and wire; throws DomainError if empty.
double extract_qoi(const WireTrace& trace);

} // namespace etuq
