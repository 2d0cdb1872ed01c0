#include <pybind11/pybind11.h>
PYBIND11_MODULE(_levyito, m) { m.doc() = "wip"; }
