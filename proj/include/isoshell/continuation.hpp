#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isoshell/bvp.hpp"
#include "isoshell/representation.hpp"

namespace isoshell {

/// A point of the solution curve projected onto the (N, y0) plane.
struct PlanePoint {
    double N = 0.0;
    double y0 = 0.0;
};

struct BranchPoint {
    double N = 0.0;
    double y0 = 0.0;
    int solution_id = -1;  ///< key into the path problem's solution store, -1 if evicted
    int newton_iters = 0;
};

struct Branch {
    std::vector<BranchPoint> points;
    std::vector<int> turning_points;  ///< indices where the sign of dN flips
    int solve_count = 0;              ///< all BVP solves consumed
    int corrector_calls = 0;
};

struct ContinuationConfig {
    double delta0 = 0.2;
    double delta_min = 1e-4;
    double delta_max = 0.5;
    int n_min = 3;
    int n_max = 10;
    double dN = 0.05;        ///< offset of the second starting point
    double N_margin = 0.01;  ///< guard band around thresholds
    double dedup_tol = 1e-4; ///< |dy0| below which two target solutions coincide
    double dN_noise = 1e-7;  ///< |dN| below this carries no direction information
    int max_solves = 100000;
    int max_folds = 0;       ///< branch tracing: stop after this many folds (0 = by events)
    std::optional<Thresholds> thresholds;
    AdaptConfig solver;
};

enum class StopReason { event_exhausted, turning_point_without_event, config_limit };
std::string to_string(StopReason reason);

/// Abstraction of the corrector backend so that the pathfollowing logic can be
/// exercised against analytic fixtures as well as the finite-difference
/// solver.
class PathProblem {
public:
    struct Result {
        PlanePoint z;
        int solution_id = -1;
        int newton_iters = 0;
    };

    /// Plain solve at boundary parameter N; guess_id < 0 means cold start.
    virtual Result solve_at(double N, int guess_id) = 0;
    /// Corrector solve constrained to the hyperplane through w orthogonal to v.
    virtual Result correct(const PlanePoint& w, const PlanePoint& v, int guess_id) = 0;
    /// Keep the identified solution alive for the caller.
    virtual void pin(int id) = 0;
    virtual ~PathProblem() = default;
};

/// Corrector backend over the adaptive finite-difference solver. Retains the
/// most recent solutions plus anything pinned; evicted ids resolve to -1 in
/// the branch record.
class HofidPath : public PathProblem {
public:
    explicit HofidPath(AdaptConfig solver, GuessStrategy cold_start = GuessStrategy::Midpoint);

    Result solve_at(double N, int guess_id) override;
    Result correct(const PlanePoint& w, const PlanePoint& v, int guess_id) override;
    void pin(int id) override;

    const BvpSolution& solution(int id) const;
    bool alive(int id) const { return store_.count(id) != 0; }

private:
    Result admit(BvpSolution sol);
    std::pair<Mesh, std::vector<double>> starting_point(double N, int guess_id) const;

    AdaptConfig solver_;
    GuessStrategy cold_start_;
    std::map<int, BvpSolution> store_;
    std::vector<int> recent_;
    std::vector<int> pinned_;
    int next_id_ = 0;
};

/// Secant predictor: w = z2 + delta (z2 - z1)/||z2 - z1||. Throws on z1 == z2.
PlanePoint predictor(const PlanePoint& z1, const PlanePoint& z2, double delta);

/// Stepsize scheme: halve on failure or slow convergence (n_k > n_max), double
/// on fast convergence (n_k < n_min), clamped to [delta_min, delta_max].
double adapt_delta(double delta, int n_k, bool converged, const ContinuationConfig& config);

/// True iff N_target lies in the closed interval of the two N values.
bool detect_event(double N_target, const PlanePoint& a, const PlanePoint& b);

/// Starting pair: a direct solve at N_target on the lower branch and a second
/// solve at N_target + dN (sign flipped near N2 so the trace still runs toward
/// the fold). Throws InitialSolveFailedError with a remedial hint.
std::pair<PathProblem::Result, PathProblem::Result> first_two_points(
    PathProblem& problem, double N_target, const ContinuationConfig& config);

struct EnumerationResult {
    std::vector<int> solution_ids;  ///< pinned, ordered by increasing y0
    std::vector<double> y0_values;
    Branch branch;
    StopReason stopped_reason = StopReason::config_limit;
    std::vector<std::string> event_failures;  ///< diagnostics of event re-solves that failed
};

/// Full enumeration of the solutions at N_target: trace the branch, re-solve
/// at N_target on every event, deduplicate by y0, stop once a turning point is
/// passed without an intervening event (or provably no event can follow).
EnumerationResult enumerate_solutions(PathProblem& problem, double N_target,
                                      const ContinuationConfig& config);

/// Trace the branch from N_start without event handling; stops after
/// config.max_folds turning points (or max_solves).
Branch trace_branch(PathProblem& problem, double N_start, const ContinuationConfig& config);

/// Locally refine a traced turning point (which = 0: first fold, estimating
/// N2; which = 1: second fold, estimating N1) until successive extremal N
/// values differ by less than tol. Throws DomainError when the branch does not
/// contain the requested turning point.
double find_fold(PathProblem& problem, const Branch& branch, int which, double tol = 1e-8);

}  // namespace isoshell
