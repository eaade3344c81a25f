"""Agent modules"""
