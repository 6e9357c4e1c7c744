from recall_sentinel.models.Lexicon.lexicon import (DrugEntry, DrugLexicon, PhraseMatcher, SymptomLexicon,
                                                    contains_symptom, load_drug_lexicon, load_symptom_lexicon,
                                                    match_drugs, normalize_text, write_drug_lexicon,
                                                    write_symptom_lexicon)

__all__ = ['DrugEntry', 'DrugLexicon', 'PhraseMatcher', 'SymptomLexicon', 'contains_symptom', 'load_drug_lexicon',
           'load_symptom_lexicon', 'match_drugs', 'normalize_text', 'write_drug_lexicon', 'write_symptom_lexicon']
