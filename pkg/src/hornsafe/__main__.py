from hornsafe.cli import main

raise SystemExit(main())
