"""Report Agent"""
