"""Parser Agent"""
