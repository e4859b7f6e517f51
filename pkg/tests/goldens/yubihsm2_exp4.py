# generated-by: hornpoc 0.1.0 model=yubihsm2_exp4 query=iknows(sens[])
import mocktoken

session = mocktoken.connect()

x1 = session.wrap(2, 1)
x2 = mocktoken.open_wrap(mocktoken.known_key(2), x1); mocktoken.report(x2)

session.cleanup()
