from setuptools import setup, find_packages

setup(
    name="vloop_detector",
    version="0.1",
    packages=find_packages(exclude=("test", "examples*")),
)
