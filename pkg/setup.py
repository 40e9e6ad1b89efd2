from setuptools import setup, find_packages

with open("README.md") as f:
    readme = f.read()


setup(
    name="fdstates",
    version="2026.10.1",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Programming Language :: Python :: 3",
    ],
    description="Finite-dimensional coherent and squeezed states in driven Kerr media.",
    keywords=["Quantum optics", "Kerr nonlinearity", "Fock space", "Open quantum systems"],
    license="MIT",
    long_description=readme,
    long_description_content_type="text/markdown",
    packages=find_packages("src"),
    package_dir={"": "src"},
    package_data={"fdstates": ["presets/*.json", "schemas/*.json"]},
    python_requires=">=3.7",
    install_requires=["numpy", "scipy", "tqdm"],  # required packages here
    extras_require={"test": ["pytest", "pytest-mock"]},
    entry_points={"console_scripts": ["fdstates = fdstates.cli:main"]},
)
