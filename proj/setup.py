from glob import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext_modules = [
    Pybind11Extension(
        "commu._core",
        sorted(glob("src/*.cpp")) + ["python/commu_bindings.cpp"],
        include_dirs=["include", "vendor"],
        cxx_std=20,
    ),
]

setup(
    packages=["commu"],
    package_dir={"": "python"},
    ext_modules=ext_modules,
    cmdclass={"build_ext": build_ext},
)
