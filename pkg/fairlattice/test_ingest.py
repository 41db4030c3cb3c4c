import logging
import os
import sys
import tempfile
import unittest

import pandas as pd
import yaml

from fairlattice import ingest, synth
from fairlattice.exceptions import ConfigError, DataError, MappingError
from fairlattice.models import SyntheticConfig
from fairlattice.tally import build_table

if len(sys.argv) > 1 and sys.argv[1] == 'test':
    logging.disable(logging.CRITICAL)

CONF_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'conf')

ADULT_SAMPLE = """age,workclass,marital-status,race,gender,income
39,State-gov,Never-married,White,Male,<=50K
50,Self-emp-not-inc,Married-civ-spouse,White,Male,<=50K
38,?,Divorced,Black,Female,>50K
53,Private,Married-civ-spouse,Black,Male,>50K.
40,Private,Widowed,Asian-Pac-Islander,Female,<=50K.
28,Private,Married-AF-spouse,?,Female,>50K
"""

RAW_ADULT = """|1x3 Cross validator
25, Private, 226802, 11th, 7, Never-married, Machine-op-inspct, Own-child, Black, Male, 0, 0, 40, United-States, <=50K.
44, Private, 160323, Some-college, 10, Married-civ-spouse, Machine-op-inspct, Husband, White, Male, 7688, 0, 40, United-States, >50K.
"""


class CsvTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w') as file:
            file.write(text)
        return path

    def test_threshold_rule(self):
        path = self.write('ages.csv', "age,label\n30,1\n40,0\n55,1\n")
        cfg = ingest.BinarizationConfig(
            attributes=(ingest.ThresholdRule(name='age', columns=('age',), threshold=40),),
            label=ingest.ValueSetRule(name='label', columns=('label',), positive=('1',), negative=('0',)))
        data = ingest.load_csv(path, cfg)
        assert data.attributes[:, 0].tolist() == [0, 1, 1]
        assert data.y_true.tolist() == [1, 0, 1]

    def test_adult_preset(self):
        data = ingest.load_csv(self.write('adult.csv', ADULT_SAMPLE), ingest.adult_preset())
        assert data.attribute_names == ('sex', 'race', 'age', 'marital-status')
        # the last row has a missing race; the missing workclass is not a configured column
        assert data.n_rows == 5
        assert data.dropped_rows == 1
        assert data.attributes.tolist() == [
            [1, 1, 0, 0],
            [1, 1, 1, 1],
            [0, 0, 0, 0],
            [1, 0, 1, 1],
            [0, 0, 1, 0],
        ]
        assert data.y_true.tolist() == [0, 0, 1, 1, 0]

    def test_raw_file_without_header(self):
        data = ingest.load_csv(self.write('adult.test', RAW_ADULT), ingest.adult_preset(), header=False)
        assert data.n_rows == 2
        assert data.attributes.tolist() == [[1, 0, 0, 0], [1, 1, 1, 1]]
        assert data.y_true.tolist() == [0, 1]

    def test_missing_column(self):
        path = self.write('nosex.csv', "age,race,marital-status,class\n40,White,Widowed,>50K\n")
        with self.assertRaises(ConfigError):
            ingest.load_csv(path, ingest.adult_preset())

    def test_unmappable_value(self):
        path = self.write('odd.csv', ADULT_SAMPLE.replace("Widowed", "Engaged"))
        with self.assertRaises(MappingError) as e:
            ingest.load_csv(path, ingest.adult_preset())
        assert e.exception.row == 4
        assert e.exception.value == "Engaged"

    def test_non_numeric_threshold_value(self):
        path = self.write('ages.csv', "age,label\n30,1\nforty,0\n")
        with self.assertRaises(MappingError) as e:
            ingest.load_csv(path, ingest.BinarizationConfig(
                attributes=(ingest.ThresholdRule(name='age', columns=('age',), threshold=40),),
                label=ingest.ValueSetRule(name='label', columns=('label',), positive=('1',))))
        assert e.exception.row == 1

    def test_others_default(self):
        rule = ingest.ValueSetRule(name='race', columns=('race',), positive=('White',), negative=('Black',), others=0)
        path = self.write('race.csv', "race,label\nWhite,1\nOther,0\nBlack,1\n")
        data = ingest.load_csv(path, ingest.BinarizationConfig(
            attributes=(rule,), label=ingest.ValueSetRule(name='label', columns=('label',), positive=('1',))))
        assert data.attributes[:, 0].tolist() == [1, 0, 0]

    def test_missing_file(self):
        with self.assertRaises(DataError):
            ingest.load_csv(os.path.join(self.tmp.name, 'absent.csv'), ingest.adult_preset())

    def test_round_trip_with_identity_config(self):
        data = synth.generate(SyntheticConfig(m=4, vertex_size=5, seed=3, delta=0.2, n_biased_low=2))
        data = data.with_predictions(1 - data.y_true)
        path = os.path.join(self.tmp.name, 'synth.csv')
        ingest.save_csv(data, path)
        again = ingest.load_csv(path, ingest.identity_config_for(path))
        assert again.attribute_names == data.attribute_names
        assert build_table(again).same_counts(build_table(data))

    def test_identity_needs_label(self):
        path = self.write('nolabel.csv', "p1,p2\n0,1\n")
        with self.assertRaises(ConfigError):
            ingest.identity_config_for(path)


class ConfigTest(unittest.TestCase):
    def test_shipped_adult_config_matches_preset(self):
        assert ingest.load_config(os.path.join(CONF_DIR, 'adult.yml')) == ingest.adult_preset()

    def test_dict_round_trip(self):
        cfg = ingest.adult_preset()
        assert ingest.BinarizationConfig.from_dict(yaml.safe_load(yaml.safe_dump(cfg.to_dict()))) == cfg

    def test_preset_values(self):
        rules = {r.name: r for r in ingest.adult_preset().attributes}
        marital = rules['marital-status']
        assert marital.apply('m', pd.Series(['Widowed', 'Married-AF-spouse'])).tolist() == [0, 1]
        assert rules['age'].apply('age', pd.Series(['40', '39'])).tolist() == [1, 0]

    def test_invalid_configs(self):
        with self.assertRaises(ConfigError):
            ingest.BinarizationConfig.from_dict({'label': {'positive': ['1']}})
        with self.assertRaises(ConfigError):
            ingest.BinarizationConfig.from_dict({'attributes': [{'name': 'a', 'positive': ['x'], 'colour': 1}],
                                                 'label': {'positive': ['1']}})
        with self.assertRaises(ConfigError):
            ingest.rule_from_dict({'name': 'a', 'threshold': 'high'})
        with self.assertRaises(ConfigError):
            ingest.ValueSetRule(name='a', columns=('a',), positive=('x',), negative=('x',))
        with self.assertRaises(ConfigError):
            ingest.load_config('/nonexistent/binarization.yml')

    def test_malformed_yaml(self):
        with tempfile.NamedTemporaryFile('w', suffix='.yml', delete=False) as file:
            file.write("attributes: [unclosed\n")
        try:
            with self.assertRaises(ConfigError):
                ingest.load_config(file.name)
        finally:
            os.remove(file.name)


if __name__ == '__main__':
    unittest.main()
