"""
Configuration package for the HeisenBH subelliptic geometry engine.
Contains settings, constants and the run configuration loader.
"""
