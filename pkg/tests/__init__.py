# Paquete de pruebas: permite importar main.py desde la raíz del repositorio
