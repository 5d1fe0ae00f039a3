"""Frozen oracle values; regenerate with tests/oracles/generate_reference.py."""

BETA1 = 1.1868421686343891
BETA2_ALPHA_HALF = 2.0261656625140022
ETA_AT_1 = 1.5344761651523959
LAMBDA_AT_1_ALPHA_HALF = 3.4648608937736253
LAMBDA_AT_50_ALPHA_HALF = 1.0185925636888622e-18
LAMBDA_PEAK_ALPHA_HALF = 3.5138307191251612
LAMBDA_AT_BETA2_ALPHA_HALF = 2.9468308710430148
