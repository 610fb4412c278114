#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qres/operators.hpp"

namespace py = pybind11;
using namespace qres;

PYBIND11_MODULE(_qres, m) {
    m.doc() = "Conic-programming toolkit for incompatibility, teleportation and Buscemi nonlocality";

    py::register_exception<dimension_error>(m, "DimensionError");
    py::register_exception<domain_error>(m, "QresDomainError");
    py::register_exception<validation_error>(m, "QresValidationError");
    py::register_exception<solver_error>(m, "SolverError");
    py::register_exception<resource_error>(m, "ResourceError");

    py::class_<HermitianOperator>(m, "HermitianOperator")
        .def(py::init<std::vector<int>, Matrix, double>(), py::arg("dims"), py::arg("entries"),
             py::arg("warn_defect") = 1e-10)
        .def_property_readonly("dims", &HermitianOperator::dims)
        .def_property_readonly("matrix", &HermitianOperator::matrix)
        .def_property_readonly("side", &HermitianOperator::side)
        .def("trace", &HermitianOperator::trace)
        .def("min_eigenvalue", &HermitianOperator::min_eigenvalue)
        .def("__repr__", [](const HermitianOperator& h) {
            std::string s = "HermitianOperator(dims=[";
            for (size_t i = 0; i < h.dims().size(); ++i) s += (i ? "," : "") + std::to_string(h.dims()[i]);
            return s + "])";
        });

    m.def("kron", py::overload_cast<const HermitianOperator&, const HermitianOperator&>(&kron));
    m.def("partial_trace", [](const HermitianOperator& op, const std::set<int>& over) { return partial_trace(op, over); });
    m.def("partial_transpose", py::overload_cast<const HermitianOperator&, int>(&partial_transpose));
    m.def("permute_systems", py::overload_cast<const HermitianOperator&, const std::vector<int>&>(&permute_systems));
    m.def("max_entangled", &max_entangled, py::arg("d"));
    m.def("transpose_trick", &transpose_trick, py::arg("o"), py::arg("d"));
    m.def("heisenberg_weyl", &heisenberg_weyl, py::arg("d"));
    m.def("choi_teleportation", &choi_teleportation, py::arg("ma"), py::arg("rho"), py::arg("tol") = 1e-8);
    m.def("linear_map_apply", &linear_map_apply, py::arg("j"), py::arg("mb"));
}
