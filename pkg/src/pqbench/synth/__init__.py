from .circuit import BranchState, Network, TopologyError, make_network, phasor_solution, phasor_state, step
from .params import (CHANNELS, N_SAMPLES, PARAM_RANGES, PERTURBATION_RANGE, SAMPLE_RATE,
                     CircuitConfig, ConfigurationError, SynthParams, sample_params)
from .waveform import WaveformRecord, build_network, generate, init_steady_state, simulate
from .taxonomy import CLASS_NAMES, N_CLASSES, EventClass, FaultSpec, fault_topology
