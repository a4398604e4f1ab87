from enum import Enum


class ConfigCategory(Enum):
    """
    ConfigCategory: Enum of config categories.
    Corresponds to the name of the folders containing yaml configuration files
    """

    SCENARIO = "scenario_configs"


class ScenarioConfigName(Enum):
    """
    ScenarioConfigName: Enum of named synthetic scenarios.
    Corresponds to the name of the yaml file in seqgrowth/configs/scenario_configs.
    """

    RANDOM_M40 = "random_m40"
    RANDOM_M200 = "random_m200"
    CLIQUE = "clique"
    HUB = "hub"
