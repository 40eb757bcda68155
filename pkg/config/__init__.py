"""Configuration package for the lexspec toolkit"""
