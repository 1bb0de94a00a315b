from alphamod.cli.main import main

main()
