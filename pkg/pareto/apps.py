from django.apps import AppConfig


class ParetoConfig(AppConfig):
    name = 'pareto'
    verbose_name = 'Pareto eigenpair solvers'
