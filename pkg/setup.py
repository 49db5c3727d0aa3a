#!/usr/bin/env python
# -*- encoding: utf-8 -*-
from setuptools import find_packages, setup


if __name__ == "__main__":
    setup(
        name='pmlfsla',
        version='0.1.0',
        description='Partial multi-label feature selection by latent space alignment',
        package_dir={'': 'src'},
        packages=find_packages('src'),
        py_modules=['manage'],
        python_requires='>=3.8',
        install_requires=[
            'Django>=4.2,<5',
            'djangorestframework>=3.14',
            'numpy>=1.24',
            'scipy>=1.10',
            'scikit-learn>=1.2',
            'pandas>=2.0',
            'joblib>=1.2',
        ],
        entry_points={'console_scripts': ['pmlfsla=manage:main']},
    )
