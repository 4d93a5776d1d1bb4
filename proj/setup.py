import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

here = os.path.dirname(os.path.abspath(__file__))

core_sources = [
    "src/stft.cpp",
    "src/spatial.cpp",
    "src/noise_fields.cpp",
    "src/beamform.cpp",
    "src/hybrid.cpp",
    "src/subspace.cpp",
    "src/pipeline.cpp",
    "src/metrics.cpp",
    "src/scene.cpp",
    "src/wav.cpp",
    "src/containers.cpp",
    "src/config.cpp",
]

eigen_include = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "_sshyb",
    sources=["bindings/pymodule.cpp"] + core_sources,
    include_dirs=[os.path.join(here, "include"), os.path.join(here, "vendor"), eigen_include],
    cxx_std=20,
)

setup(
    packages=["sshyb"],
    package_dir={"": "python"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
