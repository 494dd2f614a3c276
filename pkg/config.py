# config.py - Конфигурация инструментария
# Все параметры читаются из окружения (.env), флаги CLI имеют приоритет

import os
from dotenv import load_dotenv

load_dotenv()


def _optional_float(name: str):
    value = os.getenv(name)
    return float(value) if value else None


# Логирование
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Платформа DemoCar: 1 такт на инструкцию, кварц 200 МГц
DEMOCAR_FREQUENCY_HZ = int(os.getenv("DEMOCAR_FREQUENCY_HZ", "200000000"))
DEMOCAR_TICKS_PER_INSTRUCTION = int(os.getenv("DEMOCAR_TICKS_PER_INSTRUCTION", "1"))

# Период внешних событий коленвала для CylNumTriggeredTask (мкс)
CYLNUM_INJECTION_PERIOD_US = int(os.getenv("CYLNUM_INJECTION_PERIOD_US", "10000"))

# Сеть на кристалле
NOC_HOP_LATENCY_NS = int(os.getenv("NOC_HOP_LATENCY_NS", "10"))  # задержка на один переход, нс
NOC_FLIT_BITS = int(os.getenv("NOC_FLIT_BITS", "32"))

# Потолок числа заданий за гиперпериод (защита от лавины активаций)
SIM_MAX_JOBS = int(os.getenv("SIM_MAX_JOBS", "100000"))

# Генетический алгоритм
GA_GENERATIONS = int(os.getenv("GA_GENERATIONS", "100"))
GA_POPULATION = int(os.getenv("GA_POPULATION", "20"))
GA_ISLANDS = int(os.getenv("GA_ISLANDS", "1"))
GA_ISLAND_POPULATION = int(os.getenv("GA_ISLAND_POPULATION", "100"))
GA_MIGRATION_INTERVAL = int(os.getenv("GA_MIGRATION_INTERVAL", "10"))
GA_CROSSOVER_RATE = float(os.getenv("GA_CROSSOVER_RATE", "0.9"))
GA_MUTATION_RATE = _optional_float("GA_MUTATION_RATE")  # None = 1 / длина хромосомы
GA_ELITISM = int(os.getenv("GA_ELITISM", "1"))
GA_TOURNAMENT_SIZE = int(os.getenv("GA_TOURNAMENT_SIZE", "2"))
GA_SEED = int(os.getenv("GA_SEED", "1"))

# Число процессов для оценки приспособленности
EVAL_WORKERS = int(os.getenv("EVAL_WORKERS", "1"))
