# Independent reference: integrate y(psi) in the original coordinates with LSODA.
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
def setup(r,rho,al,de,ga):
    a=rho/(r+rho); k=de/(r+rho); c0=(r+rho-de)/rho
    xu=al/(r+rho*(1-al)); A=al**-ga
    f=lambda ps,y: [a*(c0-ps**(-1/ga))*y[0]/(y[0]-k*ps)]
    return a,k,c0,xu,A,f
def patient(r,rho,al,de,ga,eps=1e-7):
    a,k,c0,xu,A,f=setup(r,rho,al,de,ga)
    psi0=c0**-ga; y0=k*psi0
    b=rho*y0*psi0**(-1-1/ga)/((r+rho)*ga)
    s=(k+np.sqrt(k*k+4*b))/2
    R=solve_ivp(f,[psi0*(1+eps),A],[y0+eps*psi0*s],rtol=1e-12,atol=1e-15,method='LSODA',dense_output=True)
    ya=R.y[0,-1]; xa=A/(rho*ya)-1/rho
    return dict(R=R,xa=xa,ya=ya,psi0=psi0,c0=c0,A=A,x0=c0/de,xu=xu)
def cstar_right(d,x,rho,ga):
    # x in (xa, x0): psi in (psi0, A)
    R=d['R']; p=brentq(lambda p:(p/R.sol(p)[0]-1)/rho-x, d['psi0']*(1+1.0000001e-7), d['A'],xtol=1e-15)
    return p**(-1/ga)
r,rho=0.02,0.18
d=patient(r,rho,0.2,0.125,0.05)
x0=d['x0']; de,ga,al=0.125,0.05,0.2
print('fig6 xa %.10f ya %.10f'%(d['xa'],d['ya']))
print('fig6 g(xa) %.10f'%(1+de/ga*(d['xa']-x0)/(1+rho*d['xa'])-al))
g=lambda x: 1+de/ga*(x-x0)/(1+rho*x)-cstar_right(d,x,rho,ga)
xh=brentq(g,d['xa']+1e-6,x0-1e-4,xtol=1e-13); print('fig6 xhp %.10f'%xh)
for x in [2.6,2.8,3.0,3.2]: print('fig6 c*(%g)=%.10f'%(x,cstar_right(d,x,rho,ga)))
d2=patient(r,rho,0.2,0.125,2.0)
print('patient g2 xa %.10f ya %.10f'%(d2['xa'],d2['ya']))
for x in [2.0,2.5,3.0]: print('patient g2 c*(%g)=%.10f'%(x,cstar_right(d2,x,rho,2.0)))
# impatient: backward from A
al,ga=0.6,2.0
a,k,c0,xu,A,f=setup(r,rho,al,de,ga)
ya=A/(1+rho*xu)
L=solve_ivp(f,[A,A*0.05],[ya],rtol=1e-12,atol=1e-16,method='LSODA',dense_output=True)
def cimp(x):
    p=brentq(lambda p:(p/L.sol(p)[0]-1)/rho-x, A*0.05, A*(1-1e-12),xtol=1e-15); return p**(-1/ga)
for x in [7.0,10.0,13.043478260869565,20.0]: print('impatient c*(%g)=%.10f'%(x,cimp(x)))
