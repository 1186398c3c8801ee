#include "isoshell/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "isoshell/errors.hpp"
#include "isoshell/numerics.hpp"

namespace isoshell {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::event_exhausted: return "event-exhausted";
        case StopReason::turning_point_without_event: return "turning-point-without-event";
        case StopReason::config_limit: return "config-limit";
    }
    return "unknown";
}

HofidPath::HofidPath(AdaptConfig solver, GuessStrategy cold_start)
    : solver_(std::move(solver)), cold_start_(cold_start) {}

std::pair<Mesh, std::vector<double>> HofidPath::starting_point(double N, int guess_id) const {
    if (guess_id >= 0) {
        const auto it = store_.find(guess_id);
        if (it == store_.end())
            throw std::logic_error("HofidPath: guess solution was evicted");
        return {it->second.mesh, it->second.y};
    }
    Mesh mesh = Mesh::uniform(0.0, 1.0, 20);  // 21 initial equispaced points
    const InitialGuess g = initial_guess(N, cold_start_);
    std::vector<double> y(mesh.nodes.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = g.value(mesh.nodes[i]);
    return {std::move(mesh), std::move(y)};
}

PathProblem::Result HofidPath::solve_at(double N, int guess_id) {
    auto [mesh, y] = starting_point(N, guess_id);
    return admit(solve_adaptive(mesh, y, RightBoundary::neumann(N), solver_));
}

PathProblem::Result HofidPath::correct(const PlanePoint& w, const PlanePoint& v, int guess_id) {
    auto [mesh, y] = starting_point(std::max(w.N, 0.1), guess_id);
    const double rhs = v.N * w.N + v.y0 * w.y0;
    return admit(solve_adaptive(mesh, y, RightBoundary::hyperplane(v.N, v.y0, rhs), solver_));
}

PathProblem::Result HofidPath::admit(BvpSolution sol) {
    const int id = next_id_++;
    Result r;
    r.z = {sol.N, sol.y0()};
    r.solution_id = id;
    r.newton_iters = sol.stats.newton_iters;
    store_.emplace(id, std::move(sol));
    recent_.push_back(id);
    while (recent_.size() > 6) {
        const int old = recent_.front();
        recent_.erase(recent_.begin());
        if (std::find(pinned_.begin(), pinned_.end(), old) == pinned_.end()) store_.erase(old);
    }
    return r;
}

void HofidPath::pin(int id) {
    if (std::find(pinned_.begin(), pinned_.end(), id) == pinned_.end()) pinned_.push_back(id);
}

const BvpSolution& HofidPath::solution(int id) const {
    const auto it = store_.find(id);
    if (it == store_.end()) throw std::out_of_range("HofidPath: solution evicted or unknown");
    return it->second;
}

PlanePoint predictor(const PlanePoint& z1, const PlanePoint& z2, double delta) {
    const double dx = z2.N - z1.N, dy = z2.y0 - z1.y0;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) throw std::invalid_argument("predictor: zero secant (z1 == z2)");
    return {z2.N + delta * dx / len, z2.y0 + delta * dy / len};
}

double adapt_delta(double delta, int n_k, bool converged, const ContinuationConfig& config) {
    if (!converged || n_k > config.n_max) return std::max(delta / 2.0, config.delta_min);
    if (n_k < config.n_min) return std::min(2.0 * delta, config.delta_max);
    return delta;
}

bool detect_event(double N_target, const PlanePoint& a, const PlanePoint& b) {
    return N_target >= std::min(a.N, b.N) && N_target <= std::max(a.N, b.N);
}

std::pair<PathProblem::Result, PathProblem::Result> first_two_points(
    PathProblem& problem, double N_target, const ContinuationConfig& config) {
    if (config.thresholds && N_target > config.thresholds->n2)
        throw InitialSolveFailedError(
            "first_two_points: N exceeds N2, no solution exists; select a lower N");

    PathProblem::Result z1;
    try {
        z1 = problem.solve_at(N_target, -1);
    } catch (const SolveError& e) {
        throw InitialSolveFailedError(std::string("first_two_points: direct solve failed (") +
                                      e.what() +
                                      "); start with a lower N and reach the target by "
                                      "continuation");
    }

    double dn = config.dN;
    if (config.thresholds && N_target > config.thresholds->n2 - 2.0 * config.dN) dn = -config.dN;
    PathProblem::Result z2;
    try {
        z2 = problem.solve_at(N_target + dn, z1.solution_id);
    } catch (const SolveError& e) {
        throw InitialSolveFailedError(std::string("first_two_points: offset solve failed (") +
                                      e.what() + ")");
    }
    // The trace must run toward increasing N; when the offset steps down, the
    // pair is swapped so the secant still points at the fold.
    if (dn < 0.0) return {z2, z1};
    return {z1, z2};
}

namespace {

struct TraceState {
    Branch branch;
    StopReason reason = StopReason::config_limit;
    std::vector<int> solution_ids;
    std::vector<double> y0_values;
    std::vector<std::string> event_failures;
};

TraceState run_path(PathProblem& problem, double N_target, const ContinuationConfig& config,
                    bool enumerate_mode) {
    auto [r_prev, r_cur] = first_two_points(problem, N_target, config);

    TraceState st;
    st.branch.points.push_back({r_prev.z.N, r_prev.z.y0, r_prev.solution_id, r_prev.newton_iters});
    st.branch.points.push_back({r_cur.z.N, r_cur.z.y0, r_cur.solution_id, r_cur.newton_iters});
    st.branch.solve_count = 2;

    const auto try_add_solution = [&](const PathProblem::Result& r) {
        for (double y : st.y0_values)
            if (std::abs(y - r.z.y0) < config.dedup_tol) return false;
        problem.pin(r.solution_id);
        st.solution_ids.push_back(r.solution_id);
        st.y0_values.push_back(r.z.y0);
        return true;
    };

    bool event_in_window = false;
    if (enumerate_mode) {
        // The direct solve at N_target is the first enumerated solution; the
        // initial segment trivially contains N_target and seeds the first
        // event window.
        const auto& at_target = std::abs(r_prev.z.N - N_target) <= std::abs(r_cur.z.N - N_target)
                                    ? r_prev
                                    : r_cur;
        try_add_solution(at_target);
        event_in_window = detect_event(N_target, r_prev.z, r_cur.z);
    }

    double delta = config.delta0;
    PlanePoint zp = r_prev.z, zc = r_cur.z;
    int prev_id = r_prev.solution_id;
    int cur_id = r_cur.solution_id;
    // Direction of travel in N. Tiny |dN| segments carry no information (the
    // realized N jitters at the solver noise level on near-vertical branch
    // segments), and a flip must be confirmed by the following segment before
    // it counts as a turning point.
    const auto significant_dir = [&](double dn) {
        return std::abs(dn) <= config.dN_noise ? 0 : sign_of(dn);
    };
    int prev_dir = significant_dir(zc.N - zp.N);
    int pending_dir = 0;
    int pending_index = -1;
    int folds = 0;

    while (true) {
        if (st.branch.solve_count >= config.max_solves) {
            st.reason = StopReason::config_limit;
            break;
        }

        const double dxn = zc.N - zp.N, dyn = zc.y0 - zp.y0;
        const double len = std::hypot(dxn, dyn);
        if (len == 0.0) throw SolveError("continuation: consecutive branch points coincide");
        const PlanePoint v{dxn / len, dyn / len};

        PathProblem::Result nw;
        bool corrected = false;
        while (!corrected) {
            const PlanePoint w = predictor(zp, zc, delta);
            ++st.branch.corrector_calls;
            try {
                nw = problem.correct(w, v, cur_id);
                corrected = true;
            } catch (const SolveError& e) {
                if (delta <= config.delta_min * (1.0 + 1e-12))
                    throw SolveError(std::string("continuation: corrector failed at the minimum "
                                                 "stepsize: ") +
                                     e.what());
                delta = adapt_delta(delta, 0, false, config);
            }
        }
        ++st.branch.solve_count;

        // Event on the new segment: the target is re-solved directly with the
        // nearest branch solution as guess, then the trace resumes. The
        // direct solve only converges when the guess is near enough (close to
        // a fold its basin shrinks), so on failure the step is rolled back
        // and re-taken with a smaller delta.
        if (enumerate_mode && detect_event(N_target, zc, nw.z)) {
            event_in_window = true;
            const int guess = std::abs(zc.N - N_target) <= std::abs(nw.z.N - N_target)
                                  ? cur_id
                                  : nw.solution_id;
            try {
                const auto sol = problem.solve_at(N_target, guess);
                ++st.branch.solve_count;
                try_add_solution(sol);
            } catch (const SolveError& e) {
                if (delta > config.delta_min * (1.0 + 1e-12)) {
                    delta = std::max(delta / 4.0, config.delta_min);
                    continue;  // discard the step, re-approach the crossing
                }
                // Out of stepsize room: keep the event recorded and go on,
                // with the failure retained for diagnosis.
                st.event_failures.push_back(e.what());
            }
        }
        st.branch.points.push_back({nw.z.N, nw.z.y0, nw.solution_id, nw.newton_iters});

        // Turning point detection with confirmation: a flip at zc counts only
        // once the following segment moves the same (new) way; an isolated
        // counter-segment is solver noise and is dropped.
        const int dir = significant_dir(nw.z.N - zc.N);
        bool stop = false;
        bool commit_fold = false;
        int fold_index = -1;
        if (dir != 0) {
            if (pending_dir != 0) {
                if (dir == pending_dir) {
                    commit_fold = true;
                    fold_index = pending_index;
                    prev_dir = pending_dir;
                }
                pending_dir = 0;  // committed, or reverted as a noise blip
            } else if (prev_dir != 0 && dir != prev_dir) {
                pending_dir = dir;
                pending_index = static_cast<int>(st.branch.points.size()) - 2;
                problem.pin(prev_id);
                problem.pin(cur_id);
                problem.pin(nw.solution_id);
            } else {
                prev_dir = dir;
            }
        }
        if (commit_fold) {
            st.branch.turning_points.push_back(fold_index);
            ++folds;
            if (enumerate_mode) {
                if (!event_in_window) {
                    st.reason = StopReason::turning_point_without_event;
                    stop = true;
                } else if (config.thresholds &&
                           N_target < config.thresholds->n1 - config.N_margin) {
                    // All later branch N values stay in [N1, N2]; no further
                    // event can occur below N1.
                    st.reason = StopReason::event_exhausted;
                    stop = true;
                }
                event_in_window = false;
            } else if (config.max_folds > 0 && folds >= config.max_folds) {
                st.reason = StopReason::config_limit;
                stop = true;
            }
        }
        if (stop) break;

        delta = adapt_delta(delta, nw.newton_iters, true, config);
        zp = zc;
        zc = nw.z;
        prev_id = cur_id;
        cur_id = nw.solution_id;
    }

    // Solutions ordered by increasing y0.
    std::vector<std::size_t> idx(st.solution_ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return st.y0_values[a] < st.y0_values[b]; });
    std::vector<int> ids;
    std::vector<double> y0s;
    for (std::size_t k : idx) {
        ids.push_back(st.solution_ids[k]);
        y0s.push_back(st.y0_values[k]);
    }
    st.solution_ids = std::move(ids);
    st.y0_values = std::move(y0s);
    return st;
}

}  // namespace

EnumerationResult enumerate_solutions(PathProblem& problem, double N_target,
                                      const ContinuationConfig& config) {
    TraceState st = run_path(problem, N_target, config, true);
    EnumerationResult out;
    out.solution_ids = std::move(st.solution_ids);
    out.y0_values = std::move(st.y0_values);
    out.branch = std::move(st.branch);
    out.stopped_reason = st.reason;
    out.event_failures = std::move(st.event_failures);
    return out;
}

Branch trace_branch(PathProblem& problem, double N_start, const ContinuationConfig& config) {
    TraceState st = run_path(problem, N_start, config, false);
    return std::move(st.branch);
}

namespace {

struct FoldPoint {
    double s = 0.0;  ///< chord-arclength coordinate along the local axis
    PlanePoint z;
    int id = -1;
};

}  // namespace

double find_fold(PathProblem& problem, const Branch& branch, int which, double tol) {
    if (which < 0 || which >= static_cast<int>(branch.turning_points.size()))
        throw DomainError("find_fold: requested turning point absent from the branch");
    const int idx = branch.turning_points[which];
    if (idx < 1 || idx + 1 >= static_cast<int>(branch.points.size()))
        throw DomainError("find_fold: turning point lacks neighbors on the branch");

    const auto& p1 = branch.points[idx - 1];
    const auto& p2 = branch.points[idx];
    const auto& p3 = branch.points[idx + 1];
    const bool is_max = p2.N > std::max(p1.N, p3.N);

    // Local axis through the outer points; s measures position along it.
    PlanePoint axis{p3.N - p1.N, p3.y0 - p1.y0};
    {
        const double len = std::hypot(axis.N, axis.y0);
        axis = {axis.N / len, axis.y0 / len};
    }
    const auto project = [&](const PlanePoint& z) {
        return (z.N - p1.N) * axis.N + (z.y0 - p1.y0) * axis.y0;
    };

    std::vector<FoldPoint> tri = {{project({p1.N, p1.y0}), {p1.N, p1.y0}, p1.solution_id},
                                  {project({p2.N, p2.y0}), {p2.N, p2.y0}, p2.solution_id},
                                  {project({p3.N, p3.y0}), {p3.N, p3.y0}, p3.solution_id}};
    std::sort(tri.begin(), tri.end(),
              [](const FoldPoint& a, const FoldPoint& b) { return a.s < b.s; });

    const double flip = is_max ? 1.0 : -1.0;
    double extremal_prev = flip * p2.N;

    for (int round = 0; round < 80; ++round) {
        // Parabola through the triple in (s, N); vertex position.
        const double s1 = tri[0].s, s2 = tri[1].s, s3 = tri[2].s;
        const double f1 = flip * tri[0].z.N, f2 = flip * tri[1].z.N, f3 = flip * tri[2].z.N;
        const double d21 = (f2 - f1) / (s2 - s1);
        const double d32 = (f3 - f2) / (s3 - s2);
        const double c2 = (d32 - d21) / (s3 - s1);
        double s_new;
        if (c2 >= 0.0) {
            s_new = 0.5 * (s1 + s3);  // degenerate curvature: bisect
        } else {
            s_new = 0.5 * (s1 + s2) - 0.5 * d21 / c2;
            s_new = std::clamp(s_new, s1 + 0.02 * (s3 - s1), s3 - 0.02 * (s3 - s1));
            // Avoid stalling on a repeated abscissa.
            if (std::abs(s_new - s2) < 1e-3 * (s3 - s1))
                s_new = s2 < 0.5 * (s1 + s3) ? s2 + 0.25 * (s3 - s2) : s2 - 0.25 * (s2 - s1);
        }

        const PlanePoint w{p1.N + s_new * axis.N, p1.y0 + s_new * axis.y0};
        int guess = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& t : tri) {
            if (t.id >= 0 && std::abs(t.s - s_new) < best_dist) {
                best_dist = std::abs(t.s - s_new);
                guess = t.id;
            }
        }
        if (guess < 0) throw SolveError("find_fold: no live solution around the turning point");
        const auto r = problem.correct(w, axis, guess);
        problem.pin(r.solution_id);

        // Keep the best point and its nearest neighbor on each side.
        std::vector<FoldPoint> pts = tri;
        pts.push_back({project(r.z), r.z, r.solution_id});
        std::sort(pts.begin(), pts.end(),
                  [](const FoldPoint& a, const FoldPoint& b) { return a.s < b.s; });
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (flip * pts[i].z.N > flip * pts[best].z.N) best = i;
        if (best == 0 || best + 1 == pts.size())
            throw SolveError("find_fold: lost the bracket around the turning point");
        tri = {pts[best - 1], pts[best], pts[best + 1]};

        const double extremal = flip * tri[1].z.N;
        if (round > 0 && std::abs(extremal - extremal_prev) < tol) return tri[1].z.N;
        extremal_prev = extremal;
    }
    throw SolveError("find_fold: refinement did not converge");
}

}  // namespace isoshell
