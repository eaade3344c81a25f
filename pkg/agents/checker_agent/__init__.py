"""Checker Agent"""
