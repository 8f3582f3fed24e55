# TorusMinMax – analiza Fouriera i przepływ Nasha dla gier min-max na torusie

__version__ = "0.3.0"
