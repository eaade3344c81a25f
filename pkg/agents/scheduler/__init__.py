"""Scheduler Agent"""
