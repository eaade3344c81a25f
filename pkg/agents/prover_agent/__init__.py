"""Prover Agent"""
