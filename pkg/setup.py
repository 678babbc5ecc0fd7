import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# OpenMP can be switched off (e.g. on toolchains without libgomp) by setting
# CONFINE_SIM_NO_OPENMP=1 at build time; the kernels then run single-threaded
# regardless of the num_threads argument.
if os.environ.get("CONFINE_SIM_NO_OPENMP") == "1":
    omp_compile, omp_link = [], []
else:
    omp_compile, omp_link = ["-fopenmp"], ["-fopenmp"]

extensions = [
    Extension(
        "confine_sim.kernels._core",
        ["src/confine_sim/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-std=c99"] + omp_compile,
        extra_link_args=omp_link,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
)
