#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cem/cumulant.hpp"
#include "cem/operator_algebra.hpp"

namespace cem {

// Scalar function of time referenced by handle-tagged operator terms.
// Kept as a closed set of shapes (not std::function) so systems serialize
// and reruns are reproducible from metadata alone.
struct CoefficientSchedule {
    enum class Kind { One, StepWindow, RampUp, RampDown };

    Kind kind = Kind::One;
    double t0 = 0.0;      // StepWindow: active on [t0, t1)
    double t1 = 0.0;
    double period = 1.0;  // RampUp: t/period, RampDown: 1 - t/period

    static CoefficientSchedule one();
    static CoefficientSchedule step_window(double t0, double t1);
    static CoefficientSchedule ramp_up(double period);
    static CoefficientSchedule ramp_down(double period);

    double eval(double t) const;
    // Jump times inside (t_begin, t_end); integrators split there.
    void append_breakpoints(double t_begin, double t_end, std::vector<double>& out) const;
    std::string describe() const;
    static CoefficientSchedule parse(const std::string& text);
};

// Collective decay channel: Hermitian rate matrix over the per-site
// lowering operators sigma^-_i.
struct DecayChannel {
    Eigen::MatrixXcd gamma;
};

// Model definition: Hamiltonian (terms may carry time-coefficient handles),
// dissipation channels, and the schedule table the handles refer to.
struct SystemSpec {
    int n_sites = 0;
    OperatorSum hamiltonian;
    std::vector<DecayChannel> dissipators;
    std::vector<CoefficientSchedule> handles;
    std::vector<std::string> handle_names;

    explicit SystemSpec(int n) : n_sites(n), hamiltonian(OperatorSum::zero(n)) {}

    int add_handle(std::string name, CoefficientSchedule sched);
    void add_hamiltonian(const OperatorSum& h, int handle = kNoHandle);
    void add_decay(Eigen::MatrixXcd gamma);
    bool closed() const { return dissipators.empty(); }
    void validate() const;

    // Deterministic text form; feeds cache keys and run metadata.
    std::string describe() const;
};

// Tensor product of normalized single-site pure states (c_g, c_e).
struct ProductStateSpec {
    std::vector<Eigen::Vector2cd> sites;

    static ProductStateSpec all_ground(int n);
    static ProductStateSpec all_excited(int n);
    static ProductStateSpec all_plus(int n);

    void validate() const;  // throws on unnormalized site state
    Complex site_expectation(int site, OpKind k) const;
    Complex moment_value(const Moment& m) const;
};

// d<O>/dt for the operator product `m` under `sys`: i<[H,O]> plus the
// adjoint-Lindblad dissipator, before any closure.
OperatorSum moment_rhs(const Moment& m, const SystemSpec& sys);

struct ClosureOptions {
    int order = 1;
    bool conjugate_reduction = true;
    bool parallel = true;  // frontier derivation via OpenMP; result identical either way
};

// One compiled right-hand-side monomial: coeff * schedule(t) * product of
// variable values (conjugated where flagged).
struct CompiledMonomial {
    Complex coeff;
    int handle = kNoHandle;
    std::vector<std::pair<std::int32_t, bool>> factors;  // (variable index, conjugate)
};

// Closed first-order ODE system over complex moment variables.
class MomentODESystem {
  public:
    int n_sites = 0;
    int order = 0;
    bool conjugate_reduced = true;

    std::vector<Moment> variables;             // canonical order: (order, key)
    std::vector<std::string> conjugate_keys;   // adjoint key per variable
    std::vector<int> conjugate_var;            // index of adjoint variable, -1 if dropped
    std::vector<std::vector<CompiledMonomial>> rhs;

    std::vector<CoefficientSchedule> handles;
    std::vector<std::string> handle_names;

    std::size_t count_upper_bound = 0;  // sum_k C(N,k) 3^k for k = 1..order
    std::size_t count_discovered = 0;   // distinct reachable moment keys

    std::size_t size() const { return variables.size(); }
    // Locate a moment among the variables; second = true means the value is
    // the conjugate of the stored variable.
    std::optional<std::pair<int, bool>> lookup(const Moment& m) const;

    // Structural closedness check (every referenced index in range); cheap,
    // run at generation time.
    void check_closed() const;

    void rebuild_index();  // after deserialization

  private:
    friend MomentODESystem generate_closed_system(const SystemSpec&, const ClosureOptions&);
    std::vector<std::pair<std::string, int>> index_;  // sorted key -> variable
};

// Derives the closed moment hierarchy at the given order starting from all
// first-order moments. Deterministic for fixed inputs regardless of
// ClosureOptions::parallel.
MomentODESystem generate_closed_system(const SystemSpec& sys, const ClosureOptions& opt);

// Expectation value of every variable in a product state.
Eigen::VectorXcd initial_moments(const ProductStateSpec& state, const MomentODESystem& sys);

// Versioned text serialization (exact round-trip).
std::string serialize(const MomentODESystem& sys);
MomentODESystem parse_moment_system(const std::string& text);

}  // namespace cem
