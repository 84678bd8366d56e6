# Algorithms and services
