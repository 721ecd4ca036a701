from bussgang_sdnr.cli import main

main()
