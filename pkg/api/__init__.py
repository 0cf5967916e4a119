"""
API пакет сервиса прогонов генеалогии.
"""
