# -*- coding: utf-8 -*-

from setuptools import find_packages, setup


with open('README.md') as f:
    readme = f.read()

setup(
    name='CollisionCooling',
    version='0.1.0',
    description='Collision-model thermal operations: reachable cones, no-go checks and algorithmic cooling protocols',
    long_description=readme,
    long_description_content_type='text/markdown',
    license='MIT',
    packages=find_packages(include=['hbac', 'hbac.*', 'utils', 'utils.*']),
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.10',
        'python-dotenv~=1.1.1',
        'tabulate==0.9.0',
    ],
    entry_points={
        'console_scripts': [
            'hbac-scenario=hbac.scenarios.run_scenario:main',
        ],
    },
)
