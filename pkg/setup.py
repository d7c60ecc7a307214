import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# -O2 only: no -ffast-math, so the compiled kernels stay bit-compatible with
# the pure-Python fallback (both sides evaluate the same IEEE double sequence).
extensions = [
    Extension(
        "tierbayes._kernels._speedups",
        ["src/tierbayes/_kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O2"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
