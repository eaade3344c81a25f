"""Analysis Agent"""
