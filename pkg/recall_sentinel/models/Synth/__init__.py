from recall_sentinel.models.Synth.synth import (InjectionTruth, InjectionWindow, SynthConfig, SynthResult,
                                                expand_to_query_log, generate, ramp_profile, recall_schedule,
                                                synthetic_lexicon)

__all__ = ['InjectionTruth', 'InjectionWindow', 'SynthConfig', 'SynthResult', 'expand_to_query_log', 'generate',
           'ramp_profile', 'recall_schedule', 'synthetic_lexicon']
