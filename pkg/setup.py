import os

import numpy
from setuptools import setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """The compiled kernels are optional; the numpy fallback covers a failed build."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels not built ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using pure-Python fallback")


ext_modules = []
if cythonize is not None and os.environ.get("DLBMT_NO_EXT") != "1":
    ext_modules = cythonize(
        "src/dlbmt/_kernels.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        # fused multiply-add would break bit-identity with the fallback
        ext.extra_compile_args += ["-O2", "-ffp-contract=off"]

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
