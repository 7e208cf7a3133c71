import os

from setuptools import Extension, setup

# -ffp-contract=off keeps a*b+c unfused so the kernel matches the Python engine bit for bit.
COMPILE_ARGS = ["-O3", "-ffp-contract=off", "-fno-fast-math"]

ext_modules = []
if os.environ.get("HQEA_NO_EXT") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("hqea._kernel", ["src/hqea/_kernel.pyx"], extra_compile_args=COMPILE_ARGS)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
