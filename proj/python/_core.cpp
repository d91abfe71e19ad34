#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "deanon/harness.hpp"
#include "deanon/lap.hpp"
#include "deanon/oracle.hpp"

namespace py = pybind11;
using namespace deanon;

namespace {

Permutation to_perm(const std::vector<int>& m) { return Permutation(m); }

py::dict trace_summary(const CbdaTrace& t) {
    py::dict d;
    d["status"] = to_string(t.status);
    d["f0_final"] = t.f0_final;
    d["outer_steps"] = t.steps.size();
    d["total_inner_iterations"] = t.total_inner_iterations;
    d["delta"] = t.params.delta;
    d["delta_xi"] = t.params.delta_xi;
    d["xi_max"] = t.params.xi_max;
    d["mu"] = t.params.mu;
    d["wall_ms"] = t.wall_ms;
    py::list objectives;
    for (const auto& s : t.steps) objectives.append(s.objectives);
    d["objectives"] = objectives;
    return d;
}

ProblemInstance build_instance(const Matrix& a, const Matrix& b, const Matrix& m, std::optional<Matrix> w, double s1,
                               double s2, double edge_a, std::optional<double> mu) {
    const auto cm = CommunityMatrix::from_matrix(m);
    WeightMatrix wm = w ? WeightMatrix::from_matrix(*w) : build_weight_matrix(cm, edge_a, s1, s2);
    return make_instance(AdjacencyMatrix::from_matrix(a), AdjacencyMatrix::from_matrix(b), cm, std::move(wm), s1, s2,
                         mu);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Seedless network de-anonymization with overlapping communities";

    py::register_exception<Error>(m, "DeanonError", PyExc_ValueError);

    py::class_<ProblemInstance>(m, "Instance")
        .def_property_readonly("n", &ProblemInstance::n)
        .def_property_readonly("published", [](const ProblemInstance& i) { return i.published.matrix(); })
        .def_property_readonly("auxiliary", [](const ProblemInstance& i) { return i.auxiliary.matrix(); })
        .def_property_readonly("communities", [](const ProblemInstance& i) { return i.communities.matrix(); })
        .def_property_readonly("weights", [](const ProblemInstance& i) { return i.weights.matrix(); })
        .def_readwrite("mu", &ProblemInstance::mu)
        .def_readonly("s1", &ProblemInstance::s1)
        .def_readonly("s2", &ProblemInstance::s2);

    m.def("make_instance", &build_instance, py::arg("published"), py::arg("auxiliary"), py::arg("communities"),
          py::arg("weights") = py::none(), py::arg("s1") = 0.5, py::arg("s2") = 0.5, py::arg("a") = 3.0,
          py::arg("mu") = py::none(),
          "Instance from dense 0/1 matrices; weights default to the community likelihood weights.");

    m.def(
        "generate",
        [](Index n, double eta, std::optional<Index> q, double a, double s1, double s2, double membership_prob,
           const std::string& overlap, bool weighted, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n = n;
            spec.eta = eta;
            spec.q = q;
            spec.a = a;
            spec.s1 = s1;
            spec.s2 = s2;
            spec.membership_prob = membership_prob;
            spec.overlap = overlap_from_string(overlap);
            spec.weighted = weighted;
            spec.seed = seed;
            InstanceBundle b = make_synthetic(spec);
            return py::make_tuple(std::move(b.instance), b.truth->mapping());
        },
        py::arg("n"), py::arg("eta") = 0.1, py::arg("q") = py::none(), py::arg("a") = 3.0, py::arg("s1") = 0.6,
        py::arg("s2") = 0.6, py::arg("membership_prob") = kDefaultMembershipProb, py::arg("overlap") = "ol",
        py::arg("weighted") = true, py::arg("seed") = 0, "Synthetic instance and its hidden mapping.");

    m.def(
        "load_bundle",
        [](const std::filesystem::path& dir, bool weighted) {
            InstanceBundle b = load_bundle(dir, weighted);
            py::object truth = b.truth ? py::cast(b.truth->mapping()) : py::none();
            return py::make_tuple(std::move(b.instance), truth);
        },
        py::arg("dir"), py::arg("weighted") = true);

    m.def("edge_probability", py::overload_cast<int, double>(&edge_probability), py::arg("shared"), py::arg("a"));
    m.def("weight_of", &weight_of, py::arg("p"), py::arg("s1"), py::arg("s2"));

    m.def(
        "f0", [](const Matrix& p, const ProblemInstance& inst) { return f0(p, inst); }, py::arg("p"),
        py::arg("instance"));
    m.def(
        "f0_perm", [](const std::vector<int>& p, const ProblemInstance& inst) { return f0(to_perm(p), inst); },
        py::arg("mapping"), py::arg("instance"));
    m.def("f_xi", &f_xi, py::arg("p"), py::arg("instance"), py::arg("xi"));
    m.def("grad_f_xi", &grad_f_xi, py::arg("p"), py::arg("instance"), py::arg("xi"));

    m.def(
        "solve_lap",
        [](const Matrix& cost) {
            const Assignment a = solve_lap(cost);
            return py::make_tuple(a.perm.mapping(), a.cost);
        },
        py::arg("cost"), "Minimum-cost assignment: (mapping, cost).");

    m.def(
        "cbda_solve",
        [](const ProblemInstance& inst, int max_inner_iters, std::size_t max_total_iters, int restarts,
           std::optional<double> mu, std::uint64_t seed) {
            CbdaConfig cfg;
            cfg.max_inner_iters = max_inner_iters;
            cfg.max_total_iters = max_total_iters;
            cfg.restarts = restarts;
            cfg.mu = mu;
            CbdaResult r;
            {
                py::gil_scoped_release release;
                r = cbda_solve(inst, cfg, seed);
            }
            return py::make_tuple(r.perm.mapping(), trace_summary(r.trace));
        },
        py::arg("instance"), py::arg("max_inner_iters") = 300, py::arg("max_total_iters") = 0,
        py::arg("restarts") = 0, py::arg("mu") = py::none(), py::arg("seed") = 0);

    m.def(
        "ga_solve",
        [](const ProblemInstance& inst, int population_size, int generations, double crossover_rate,
           double mutation_rate, int elitism_count, std::uint64_t seed) {
            GaConfig cfg;
            cfg.population_size = population_size;
            cfg.generations = generations;
            cfg.crossover_rate = crossover_rate;
            cfg.mutation_rate = mutation_rate;
            cfg.elitism_count = elitism_count;
            cfg.rng_seed = seed;
            GaResult r;
            {
                py::gil_scoped_release release;
                r = ga_solve(inst, cfg);
            }
            return py::make_tuple(r.perm.mapping(), r.best_f0, r.history);
        },
        py::arg("instance"), py::arg("population_size") = 100, py::arg("generations") = 500,
        py::arg("crossover_rate") = 0.9, py::arg("mutation_rate") = 0.2, py::arg("elitism_count") = 2,
        py::arg("seed") = 0);

    m.def(
        "brute_wemp",
        [](const ProblemInstance& inst) {
            const OracleResult r = brute_wemp(inst);
            return py::make_tuple(r.perm.mapping(), r.value);
        },
        py::arg("instance"));
    m.def(
        "brute_mmse",
        [](const ProblemInstance& inst) {
            const OracleResult r = brute_mmse(inst);
            return py::make_tuple(r.perm.mapping(), r.value);
        },
        py::arg("instance"));
    m.def("approx_ratio", &approx_ratio, py::arg("instance"));

    m.def(
        "nme", [](const std::vector<int>& p, const std::vector<int>& q) { return nme(to_perm(p), to_perm(q)); },
        py::arg("mapping"), py::arg("truth"));
    m.def(
        "accuracy",
        [](const std::vector<int>& p, const std::vector<int>& q) { return accuracy(to_perm(p), to_perm(q)); },
        py::arg("mapping"), py::arg("truth"));
}
