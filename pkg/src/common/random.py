import numpy as np


GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_MULTIPLIER_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_MULTIPLIER_2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    """
    splitmix64 generator. The state advances by GOLDEN_GAMMA and each output
    is mixed with shifts 30, 27, 31 and the two multipliers above, so a seed
    determines every draw independently of numpy's own bit generators.
    """

    def __init__(self, seed: int):
        self.state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)

    def next_uint64(self) -> np.uint64:
        with np.errstate(over='ignore'):
            self.state = self.state + GOLDEN_GAMMA
            z = self.state
            z = (z ^ (z >> np.uint64(30))) * MIX_MULTIPLIER_1
            z = (z ^ (z >> np.uint64(27))) * MIX_MULTIPLIER_2
            return z ^ (z >> np.uint64(31))

    def uniform(self, low: float = 0.0, high: float = 1.0, size: int = None):
        """Uniform draws in [low, high) from the top 53 bits of each output."""
        count = 1 if size is None else size
        values = np.empty(count)
        for i in range(count):
            values[i] = int(self.next_uint64() >> np.uint64(11)) * 2.0**-53

        values = low + (high - low) * values
        return float(values[0]) if size is None else values

    def spawn(self) -> 'SplitMix64':
        return SplitMix64(int(self.next_uint64()))
